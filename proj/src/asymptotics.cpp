#include "plperiod/asymptotics.hpp"

#include <cmath>

#include "plperiod/period.hpp"

namespace plperiod {

double small_e_coefficient(double p, double omega) {
    if (!(p > 1.0) || !(omega > 0.0))
        throw std::domain_error("small_e_coefficient: p > 1 and omega > 0 required");
    const double invp = 1.0 / p;
    return 2.0 * std::sqrt(2.0 * M_PI) * std::tgamma(1.0 - invp) /
           (std::pow(conjugate(p), invp) * omega * std::tgamma(1.5 - invp));
}

AsymptoticFit asymptotic_report(const PotentialSpec& pot, double E_lo, double E_hi,
                                int n, double tol) {
    if (!(E_lo > 0.0) || !(E_hi > E_lo) || E_hi >= pot.Estar)
        throw std::invalid_argument("asymptotic_report: need 0 < E_lo < E_hi < E*");
    if (n < 3) throw std::invalid_argument("asymptotic_report: n >= 3");

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double E =
            E_lo * std::pow(E_hi / E_lo, static_cast<double>(i) / (n - 1));
        const double x = std::log(E);
        const double y = std::log(period_direct(pot, E, tol).T);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double var = sxx - sx * sx / n;
    if (!(var > 1e-12 * sxx))
        throw std::invalid_argument("asymptotic_report: degenerate energy grid");

    AsymptoticFit fit;
    fit.exponent_fit = (sxy - sx * sy / n) / var;
    fit.exponent_theory = 0.5 - 1.0 / pot.p;
    fit.coeff_fit = std::exp((sy - fit.exponent_fit * sx) / n);
    fit.coeff_theory = small_e_coefficient(pot.p, pot.omega);
    fit.rel_err = std::fabs(fit.coeff_fit - fit.coeff_theory) / fit.coeff_theory;
    return fit;
}

std::vector<double> blowup_probe(const PotentialSpec& pot, int j_min, int j_max,
                                 double tol) {
    std::vector<double> out;
    out.reserve(j_max - j_min + 1);
    for (int j = j_min; j <= j_max; ++j) {
        const double E = pot.Estar * (1.0 - std::pow(10.0, -j));
        out.push_back(period_direct(pot, E, tol).T);
    }
    return out;
}

} // namespace plperiod
