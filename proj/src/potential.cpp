#include "plperiod/potential.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "plperiod/quadrature.hpp"

namespace plperiod {

double phi(double p, double s) {
    if (s == 0.0) return 0.0;
    return std::copysign(std::pow(std::fabs(s), p - 1.0), s);
}

double conjugate(double p) { return p / (p - 1.0); }

double Exponents::m() const {
    if (!q) throw std::logic_error("Exponents: q not set");
    return *q / p;
}

double Exponents::gamma_m() const {
    const double mm = m();
    return std::pow(mm, 1.0 / (mm - 1.0));
}

bool admissible(double a, double m) {
    return a > 0.0 && a < 0.5 && m > 1.0 && m < 2.0;
}

double W_of(double m, double y) { return std::pow(y, m) - m * y + m - 1.0; }

double gamma_of(const PotentialSpec& pot, double w, double E) {
    return conjugate(pot.p) * (E - pot.V(w));
}

namespace {

// (|w|^q - 1)/q - (|w|^p - 1)/p. The direct form loses ~half the digits near
// w = 1 where V itself is O((w-1)^2); the log-series restores them.
double model_V(double p, double q, double w) {
    const double aw = std::fabs(w);
    if (aw == 0.0) return 1.0 / p - 1.0 / q;
    const double L = std::log(aw);
    if (std::fabs(L) * q < 0.5) {
        double sum = 0.0;
        double term = 0.5 * L * L;  // L^k / k! at k = 2
        double qk = q, pk = p;      // q^(k-1), p^(k-1)
        for (int k = 2; k < 80; ++k) {
            const double contrib = (qk - pk) * term;
            sum += contrib;
            if (std::fabs(contrib) <= 1e-18 * std::fabs(sum) && k > 3) break;
            qk *= q;
            pk *= p;
            term *= L / (k + 1);
        }
        return sum;
    }
    return std::expm1(q * L) / q - std::expm1(p * L) / p;
}

// V'(w) = phi_q(w) - phi_p(w) = sign(w) |w|^(p-1) (|w|^(q-p) - 1).
double model_dV(double p, double q, double w) {
    if (w == 0.0) return 0.0;
    const double aw = std::fabs(w);
    const double mag = std::pow(aw, p - 1.0) * std::expm1((q - p) * std::log(aw));
    return w > 0.0 ? mag : -mag;
}

double model_d2V(double p, double q, double w) {
    const double aw = std::fabs(w);
    return (q - 1.0) * std::pow(aw, q - 2.0) - (p - 1.0) * std::pow(aw, p - 2.0);
}

double model_d3V(double p, double q, double w) {
    if (w == 0.0) return 0.0;
    const double aw = std::fabs(w);
    const double v = (q - 1.0) * (q - 2.0) * std::pow(aw, q - 3.0) -
                     (p - 1.0) * (p - 2.0) * std::pow(aw, p - 3.0);
    return w > 0.0 ? v : -v;
}

} // namespace

PotentialSpec make_model_potential(double p, double q) {
    if (!(p > 1.0) || !(q > p))
        throw std::domain_error("make_model_potential: requires 1 < p < q");
    PotentialSpec pot;
    pot.p = p;
    pot.V = [p, q](double w) { return model_V(p, q, w); };
    pot.dV = [p, q](double w) { return model_dV(p, q, w); };
    pot.d2V = [p, q](double w) { return model_d2V(p, q, w); };
    pot.d3V = [p, q](double w) { return model_d3V(p, q, w); };
    pot.A = 1.0;
    pot.B = std::pow(q / p, 1.0 / (q - p));
    pot.Estar = 1.0 / p - 1.0 / q;
    pot.omega = std::sqrt(q - p);
    pot.exps = Exponents{p, q};
    pot.name = "model";
    return pot;
}

PotentialSpec make_harmonic_potential(double omega) {
    if (!(omega > 0.0)) throw std::domain_error("make_harmonic_potential: omega > 0");
    const double w2 = omega * omega;
    PotentialSpec pot;
    pot.p = 2.0;
    pot.V = [w2](double w) { return 0.5 * w2 * (w - 1.0) * (w - 1.0); };
    pot.dV = [w2](double w) { return w2 * (w - 1.0); };
    pot.d2V = [w2](double) { return w2; };
    pot.d3V = [](double) { return 0.0; };
    pot.A = 1.0;
    pot.B = 2.0;
    pot.Estar = 0.5 * w2;
    pot.omega = omega;
    pot.name = "harmonic";
    return pot;
}

EnergyGeometry turning_points(const PotentialSpec& pot, double E) {
    if (!(E > 0.0) || !(E < pot.Estar))
        throw std::domain_error("turning_points: E must lie in (0, E*)");

    const auto excess = [&](double w) { return pot.V(w) - E; };

    // V - E is positive at 0 and B, negative at A.
    const double fA = excess(pot.A);
    if (!(fA < 0.0))
        throw HypothesisError("turning_points: V(A) >= E, no well at this energy");

    const double w1 = brent_root(excess, 0.0, pot.A, 1e-13, 200);
    const double w2 = brent_root(excess, pot.A, pot.B, 1e-13, 200);

    // The root must be the innermost crossing: V < E strictly on (w1, w2).
    for (int i = 1; i <= 7; ++i) {
        const double wl = w1 + (pot.A - w1) * i / 8.0;
        const double wr = pot.A + (w2 - pot.A) * i / 8.0;
        if (excess(wl) >= 0.0 || excess(wr) >= 0.0)
            throw HypothesisError("turning_points: V(w) = E has interior crossings; "
                                  "(w - A) V'(w) > 0 fails");
    }

    const double res = std::max(std::fabs(pot.V(w1) - E), std::fabs(pot.V(w2) - E));
    if (!(res <= 1e-10 * pot.Estar))
        throw HypothesisError("turning_points: residual above tolerance");

    return {E, w1, w2};
}

namespace {

std::vector<double> composite_grid(double B, int n) {
    std::vector<double> g;
    g.reserve(2 * n);
    for (int i = 0; i < n; ++i) g.push_back(B * (i + 0.5) / n);
    // geometric tail towards 0 to expose behaviour near the barrier
    for (int i = 0; i < n; ++i)
        g.push_back(B * std::pow(10.0, -9.0 + 9.0 * i / (n - 1.0)) / 2.0);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

} // namespace

HypothesisReport check_hypotheses(const PotentialSpec& pot, int grid_size) {
    if (grid_size < 64) throw std::invalid_argument("check_hypotheses: grid_size >= 64");
    HypothesisReport rep;
    const double B = pot.B, A = pot.A, Es = pot.Estar;
    const double delta = 1e-3 * B;
    const auto grid = composite_grid(B, grid_size);

    // --- H1: well shape ---
    {
        bool structural = Es > 0.0;
        structural = structural && std::fabs(pot.V(A)) <= 1e-9 * std::max(1.0, Es);
        structural = structural && std::fabs(pot.V(0.0) - Es) <= 1e-9 * std::max(1.0, Es);
        structural = structural && std::fabs(pot.V(B) - Es) <= 1e-9 * std::max(1.0, Es);
        if (pot.dV) structural = structural && std::fabs(pot.dV(A)) <= 1e-8 * std::max(1.0, Es / B);
        double vppA;
        if (pot.has_d2()) {
            vppA = pot.d2V(A);
        } else {
            const double h = 1e-5 * B;
            vppA = (pot.V(A + h) - 2.0 * pot.V(A) + pot.V(A - h)) / (h * h);
        }
        structural = structural && vppA > 0.0;

        double worst = std::numeric_limits<double>::infinity();
        double where = A;
        for (double w : grid) {
            if (w <= delta || w >= B - delta) continue;
            if (std::fabs(w - A) <= delta) continue;
            const double v = pot.V(w);
            const double m = std::min(v, Es - v) / Es;
            if (m < worst) {
                worst = m;
                where = w;
            }
        }
        rep.h1.margin = worst;
        rep.h1.witness = where;
        // 0 < V < E* is open: near the barrier the margin legitimately decays
        // like w^p, so strictness is the criterion, not a fixed floor.
        rep.h1.verdict = (structural && worst > 0.0) ? Verdict::holds : Verdict::fails;
        if (!pot.dV && !pot.has_d2()) rep.h1.verdict = Verdict::inconclusive;
    }

    // --- H2: |V'(w)| / w^(p-1) bounded below near 0 ---
    {
        double lb = std::numeric_limits<double>::infinity();
        double where = B * 1e-3;
        const int n = grid_size;
        for (int i = 0; i < n; ++i) {
            // geometric grid on (B*1e-10, B*1e-3]
            const double w = B * std::pow(10.0, -10.0 + 7.0 * (i + 1.0) / n);
            const double ratio = std::fabs(pot.dV(w)) / std::pow(w, pot.p - 1.0);
            if (ratio < lb) {
                lb = ratio;
                where = w;
            }
        }
        rep.h2_lower_bound = lb;
        rep.h2.margin = lb;
        rep.h2.witness = where;
        rep.h2.verdict = lb > 1e-6 ? Verdict::holds : Verdict::fails;
    }

    // --- H3: (w - A) V'(w) > 0 away from the center ---
    {
        double worst = std::numeric_limits<double>::infinity();
        double where = A;
        for (double w : grid) {
            if (w <= delta || w >= B - delta) continue;
            if (std::fabs(w - A) <= delta) continue;
            const double s = (w - A) * pot.dV(w);
            const double norm = std::fabs(w - A) * Es / B;  // |w-A| * typical |V'| scale
            const double m = s / norm;
            if (m < worst) {
                worst = m;
                where = w;
            }
        }
        rep.h3.margin = worst;
        rep.h3.witness = where;
        rep.h3.verdict = worst > 0.0 ? Verdict::holds : Verdict::fails;
    }

    return rep;
}

} // namespace plperiod
