#include "plperiod/period.hpp"

#include <cmath>

#include "plperiod/criteria.hpp"
#include "plperiod/quadrature.hpp"

namespace plperiod {

std::string to_string(PeriodMethod m) {
    switch (m) {
        case PeriodMethod::w_integral: return "w-integral";
        case PeriodMethod::theta_integral: return "theta-integral";
        case PeriodMethod::chow_wang: return "chow-wang";
        case PeriodMethod::theta_derivative: return "theta-derivative";
        default: return "ode";
    }
}

namespace {

// E - V(w) all the way into a turning point. Direct subtraction resolves
// nothing once |w - wt| < eps E* / |V'(wt)|; inside s_switch the quadratic
// expansion at the turning point takes over, where its relative error is
// O(s^2) and the nodes carry a vanishing share of the integral.
class TurningExcess {
public:
    TurningExcess(const PotentialSpec& pot, double E, double w_turn, double span)
        : V_(pot.V), E_(E), dv_(std::fabs(pot.dV(w_turn))),
          d2v_(pot.has_d2() ? pot.d2V(w_turn) : 0.0),
          s_switch_((pot.has_d2() ? 1e-6 : 1e-9) * span) {}

    // s: exact distance from w to the turning point
    double operator()(double w, double s) const {
        if (s < s_switch_) return s * (dv_ - 0.5 * d2v_ * s);
        return E_ - V_(w);
    }

private:
    const std::function<double(double)>& V_;
    double E_, dv_, d2v_, s_switch_;
};

} // namespace

PeriodSample period_direct(const PotentialSpec& pot, double E, double tol) {
    if (!(pot.p > 1.0)) throw std::domain_error("period_direct: p > 1 required");
    const EnergyGeometry geo = turning_points(pot, E);
    const double invp = 1.0 / pot.p;

    const TurningExcess excess_left(pot, E, geo.w1, pot.A - geo.w1);
    const TurningExcess excess_right(pot, E, geo.w2, geo.w2 - pot.A);

    const QuadResult left = tanh_sinh(
        TsIntegrand([&](double w, double da, double) {
            const double g = excess_left(w, da);
            if (g <= 0.0) return 0.0;
            return std::pow(g, -invp);
        }),
        geo.w1, pot.A, tol);
    const QuadResult right = tanh_sinh(
        TsIntegrand([&](double w, double, double db) {
            const double g = excess_right(w, db);
            if (g <= 0.0) return 0.0;
            return std::pow(g, -invp);
        }),
        pot.A, geo.w2, tol);

    const double pref = 2.0 / std::pow(conjugate(pot.p), invp);
    PeriodSample s;
    s.E = E;
    s.T = pref * (left.value + right.value);
    s.method = PeriodMethod::w_integral;
    s.err_estimate = pref * (left.error + right.error);
    return s;
}

// ---------------------------------------------------------------------------
// Theta parametrization
// ---------------------------------------------------------------------------

ThetaParametrization::ThetaParametrization(const PotentialSpec& pot, double E)
    : V_(pot.V), dV_(pot.dV), d2V_(pot.d2V), p_(pot.p) {
    const EnergyGeometry geo = turning_points(pot, E);
    E_ = E;
    Ap_ = std::pow(pot.A, pot.p);
    y1_ = std::pow(geo.w1, pot.p);
    y2_ = std::pow(geo.w2, pot.p);
}

double ThetaParametrization::c_p(double p) {
    return 2.0 / (p * std::pow(conjugate(p), 1.0 / p));
}

double ThetaParametrization::h(double y) const {
    if (y == Ap_) return 0.0;
    const double x = std::pow(y, 1.0 / p_);
    const double v = std::max(V_(x), 0.0);
    return std::copysign(std::sqrt(v), y - Ap_);
}

double ThetaParametrization::dh(double y) const {
    // h' = sign(y - A^p) V'(x) x'(y) / (2 sqrt(V)), x'(y) = x / (p y);
    // V' changes sign together with y - A^p, so h' > 0 on both sides.
    const double sgn = (y > Ap_) ? 1.0 : -1.0;
    const double x = std::pow(y, 1.0 / p_);
    const double v = V_(x);
    const double xp = x / (p_ * y);
    return sgn * dV_(x) * xp / (2.0 * std::sqrt(v));
}

double ThetaParametrization::d2h(double y) const {
    const double sgn = (y > Ap_) ? 1.0 : -1.0;
    const double x = std::pow(y, 1.0 / p_);
    const double v = V_(x);
    const double xp = x / (p_ * y);
    const double xpp = -xp / (conjugate(p_) * y);  // x'' = (1/p)(1/p - 1) y^(1/p - 2)
    const double dv = dV_(x);
    const double num = 2.0 * v * (d2V_(x) * xp * xp + dv * xpp) - dv * dv * xp * xp;
    return sgn * num / (4.0 * v * std::sqrt(v));
}

double ThetaParametrization::invert(double theta) const {
    if (theta == 0.0) return Ap_;
    if (theta >= 0.5 * M_PI - 1e-12) return y2_;
    if (theta <= -0.5 * M_PI + 1e-12) return y1_;
    return invert_target(std::sqrt(E_) * std::sin(theta));
}

double ThetaParametrization::invert_target(double t) const {
    if (t == 0.0) return Ap_;
    const double sE = std::sqrt(E_);
    double lo = (t < 0.0) ? y1_ : Ap_;
    double hi = (t < 0.0) ? Ap_ : y2_;
    double y = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        const double r = h(y) - t;
        if (std::fabs(r) <= 1e-14 * sE) return y;
        if (r > 0.0)
            hi = y;
        else
            lo = y;
        const double slope = dh(y);
        double ynext = y - r / slope;
        if (!(ynext > lo) || !(ynext < hi)) ynext = 0.5 * (lo + hi);
        if (ynext == y) return y;
        y = ynext;
    }
    return y;
}

namespace {

void require_theta_route(double p, const char* who) {
    if (p < 2.0)
        throw UnsupportedRouteError(std::string(who) +
                                    ": theta route requires p >= 2 "
                                    "(integrand singular for p in (1,2))");
}

// G(x) = 1 / (y^(1/p') h'(y)) at the Gauss-Jacobi node x = sin(theta).
double theta_G(const ThetaParametrization& tp, double pprime, double x) {
    const double t = std::sqrt(tp.E()) * x;
    const double y = tp.invert_target(t);
    return 1.0 / (std::pow(y, 1.0 / pprime) * tp.dh(y));
}

double theta_T_with_rule(const PotentialSpec& pot, const ThetaParametrization& tp,
                         int n_total) {
    const double p = pot.p;
    const double pprime = conjugate(p);
    const QuadRule rule = gauss_jacobi(n_total, -1.0 / p, -1.0 / p);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i)
        sum += rule.w[i] * theta_G(tp, pprime, rule.x[i]);
    return ThetaParametrization::c_p(p) * std::pow(tp.E(), 0.5 - 1.0 / p) * sum;
}

} // namespace

PeriodSample period_theta(const PotentialSpec& pot, double E, int n_nodes) {
    require_theta_route(pot.p, "period_theta");
    if (n_nodes < 4) throw std::invalid_argument("period_theta: n_nodes >= 4");
    const ThetaParametrization tp(pot, E);

    const double T = theta_T_with_rule(pot, tp, 2 * n_nodes);
    const double T_half = theta_T_with_rule(pot, tp, n_nodes);

    PeriodSample s;
    s.E = E;
    s.T = T;
    s.method = PeriodMethod::theta_integral;
    s.err_estimate = std::fabs(T - T_half);
    return s;
}

PeriodSample dperiod_chow_wang(const PotentialSpec& pot, double E, double tol) {
    if (pot.p < 2.0) throw UnsupportedRouteError("dperiod_chow_wang: requires p >= 2");
    if (!pot.has_d2())
        throw std::invalid_argument("dperiod_chow_wang: V'' is required");

    const double pprime = conjugate(pot.p);
    const EnergyGeometry geo = turning_points(pot, E);
    const double ratio_limit = 1.0 - 0.5 * pprime;
    const double patch = 1e-4 * (pot.B - pot.A);

    const auto ratio_at = [&](double w) {
        if (std::fabs(w - pot.A) < patch) return ratio_limit;
        const double dv = pot.dV(w);
        return 1.0 - pprime * pot.V(w) * pot.d2V(w) / (dv * dv);
    };

    const TurningExcess excess_left(pot, E, geo.w1, pot.A - geo.w1);
    const TurningExcess excess_right(pot, E, geo.w2, geo.w2 - pot.A);

    // T sets the scale of the absolute floor: resolve dT/dE to ~1e-11 T/E
    // so an identically-zero integrand (isochronous case) still converges.
    const PeriodSample base = period_direct(pot, E, std::min(tol, 1e-10));
    const double abs_floor = 1e-11 * 0.5 * pprime * base.T;

    // The patched ratio has small jumps at A -+ patch; keep them on piece
    // boundaries or the refinement stalls at the jump size.
    const double bl = std::max(geo.w1, pot.A - patch);
    const double br = std::min(geo.w2, pot.A + patch);

    double value = 0.0, error = 0.0;
    const auto accumulate = [&](const TsIntegrand& f, double a, double b) {
        if (!(b > a)) return;
        const QuadResult r = tanh_sinh(f, a, b, tol, abs_floor);
        value += r.value;
        error += r.error;
    };

    const TsIntegrand left([&](double w, double da, double) {
        const double g = pprime * excess_left(w, da);
        if (g <= 0.0) return 0.0;
        return ratio_at(w) * std::pow(g, -1.0 / pot.p);
    });
    // On [bl, A] the first distance argument is measured from bl; shift it
    // so the excess helper still sees the distance to the turning point.
    const double left_offset = bl - geo.w1;
    const TsIntegrand left_inner([&](double w, double da, double) {
        const double g = pprime * excess_left(w, da + left_offset);
        if (g <= 0.0) return 0.0;
        return ratio_limit * std::pow(g, -1.0 / pot.p);
    });
    const TsIntegrand right([&](double w, double, double db) {
        const double g = pprime * excess_right(w, db);
        if (g <= 0.0) return 0.0;
        return ratio_at(w) * std::pow(g, -1.0 / pot.p);
    });
    const double right_offset = geo.w2 - br;
    const TsIntegrand right_inner([&](double w, double, double db) {
        const double g = pprime * excess_right(w, db + right_offset);
        if (g <= 0.0) return 0.0;
        return ratio_limit * std::pow(g, -1.0 / pot.p);
    });

    if (bl > geo.w1) {
        accumulate(left, geo.w1, bl);
        accumulate(left_inner, bl, pot.A);
    } else {
        // the whole half-orbit sits inside the patch zone
        accumulate(left_inner, geo.w1, pot.A);
    }
    if (br < geo.w2) {
        accumulate(right_inner, pot.A, br);
        accumulate(right, br, geo.w2);
    } else {
        accumulate(right_inner, pot.A, geo.w2);
    }

    const double pref = 2.0 / (pprime * E);
    PeriodSample s;
    s.E = E;
    s.T = base.T;
    s.dT_dE = pref * value;
    s.method = PeriodMethod::chow_wang;
    s.err_estimate = pref * error + base.err_estimate;
    return s;
}

PeriodSample dperiod_theta(const PotentialSpec& pot, double E, int n_nodes) {
    require_theta_route(pot.p, "dperiod_theta");
    if (!pot.has_d2())
        throw std::invalid_argument("dperiod_theta: V'' is required for K");
    const ThetaParametrization tp(pot, E);
    const double p = pot.p;
    const double pprime = conjugate(p);

    const auto evaluate = [&](int n_total, double* J_out, double* Jp_out) {
        const QuadRule rule = gauss_jacobi(n_total, -1.0 / p, -1.0 / p);
        double J = 0.0, Jp = 0.0;
        for (std::size_t i = 0; i < rule.x.size(); ++i) {
            const double x = rule.x[i];
            const double y = tp.invert_target(std::sqrt(E) * x);
            J += rule.w[i] / (std::pow(y, 1.0 / pprime) * tp.dh(y));
            Jp += rule.w[i] * k_of(pot, y) * x;
        }
        Jp *= -1.0 / (2.0 * std::sqrt(E));
        *J_out = J;
        *Jp_out = Jp;
    };

    double J, Jp, J2, Jp2;
    evaluate(2 * n_nodes, &J, &Jp);
    evaluate(n_nodes, &J2, &Jp2);

    const double T = ThetaParametrization::c_p(p) * std::pow(E, 0.5 - 1.0 / p) * J;
    const double dT = T * ((p - 2.0) / (2.0 * p * E) + Jp / J);
    const double dT2 = (ThetaParametrization::c_p(p) * std::pow(E, 0.5 - 1.0 / p) * J2) *
                       ((p - 2.0) / (2.0 * p * E) + Jp2 / J2);

    PeriodSample s;
    s.E = E;
    s.T = T;
    s.dT_dE = dT;
    s.method = PeriodMethod::theta_derivative;
    s.err_estimate = std::fabs(dT - dT2);
    return s;
}

PeriodSample dperiod_finite_difference(const PotentialSpec& pot, double E,
                                       double h, double tol) {
    // Near E = 0 the step must scale with E: T ~ E^(1/2 - 1/p) there, so a
    // step that is a fixed fraction of E* carries O((h/E)^2) truncation.
    if (h <= 0.0) h = std::min(1e-4 * pot.Estar, 5e-3 * E);
    h = std::min(h, 0.45 * std::min(E, pot.Estar - E));
    const PeriodSample hi = period_direct(pot, E + h, tol);
    const PeriodSample lo = period_direct(pot, E - h, tol);
    PeriodSample s;
    s.E = E;
    s.T = 0.5 * (hi.T + lo.T);
    s.dT_dE = (hi.T - lo.T) / (2.0 * h);
    s.method = PeriodMethod::w_integral;
    s.err_estimate = (hi.err_estimate + lo.err_estimate) / (2.0 * h);
    return s;
}

} // namespace plperiod
