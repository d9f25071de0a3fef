#include "plperiod/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include "plperiod/period.hpp"
#include "plperiod/quadrature.hpp"

namespace plperiod {

double hamiltonian(const PotentialSpec& pot, double u, double v) {
    const double pp = conjugate(pot.p);
    return pot.V(u) + std::pow(std::fabs(v), pp) / pp;
}

std::pair<double, double> vector_field(const PotentialSpec& pot, double u, double v) {
    return {phi(conjugate(pot.p), v), -pot.dV(u)};
}

namespace {

using Vec2 = std::array<double, 2>;

struct StepResult {
    Vec2 y;      // state at t + h
    Vec2 f_end;  // field at t + h (FSAL)
    double err;  // scaled error norm
};

// Dormand-Prince 5(4) coefficients; the system is autonomous, so the stage
// abscissas never enter.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

template <typename F>
StepResult dopri_step(const F& rhs, const Vec2& y, const Vec2& f1, double h,
                      double rtol, double atol) {
    const auto ax = [&](double s, const Vec2& k) {
        return Vec2{y[0] + h * s * k[0], y[1] + h * s * k[1]};
    };
    Vec2 k1 = f1;
    Vec2 k2 = rhs(ax(a21, k1));
    Vec2 k3 = rhs(Vec2{y[0] + h * (a31 * k1[0] + a32 * k2[0]),
                       y[1] + h * (a31 * k1[1] + a32 * k2[1])});
    Vec2 k4 = rhs(Vec2{y[0] + h * (a41 * k1[0] + a42 * k2[0] + a43 * k3[0]),
                       y[1] + h * (a41 * k1[1] + a42 * k2[1] + a43 * k3[1])});
    Vec2 k5 = rhs(Vec2{y[0] + h * (a51 * k1[0] + a52 * k2[0] + a53 * k3[0] + a54 * k4[0]),
                       y[1] + h * (a51 * k1[1] + a52 * k2[1] + a53 * k3[1] + a54 * k4[1])});
    Vec2 k6 = rhs(Vec2{
        y[0] + h * (a61 * k1[0] + a62 * k2[0] + a63 * k3[0] + a64 * k4[0] + a65 * k5[0]),
        y[1] + h * (a61 * k1[1] + a62 * k2[1] + a63 * k3[1] + a64 * k4[1] + a65 * k5[1])});
    Vec2 ynew{y[0] + h * (b1 * k1[0] + b3 * k3[0] + b4 * k4[0] + b5 * k5[0] + b6 * k6[0]),
              y[1] + h * (b1 * k1[1] + b3 * k3[1] + b4 * k4[1] + b5 * k5[1] + b6 * k6[1])};
    Vec2 k7 = rhs(ynew);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                               e6 * k6[i] + e7 * k7[i]);
        const double sc = atol + rtol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
        err += (ei / sc) * (ei / sc);
    }
    return {ynew, k7, std::sqrt(0.5 * err)};
}

// Cubic Hermite interpolant over one accepted step.
struct HermiteSeg {
    double t0, h;
    Vec2 y0, y1, f0, f1;

    Vec2 eval(double theta) const {
        const double h00 = (1 + 2 * theta) * (1 - theta) * (1 - theta);
        const double h10 = theta * (1 - theta) * (1 - theta);
        const double h01 = theta * theta * (3 - 2 * theta);
        const double h11 = theta * theta * (theta - 1);
        Vec2 out;
        for (int i = 0; i < 2; ++i)
            out[i] = h00 * y0[i] + h * h10 * f0[i] + h01 * y1[i] + h * h11 * f1[i];
        return out;
    }
};

// theta in [0,1] with seg.v(theta) == 0, assuming a sign change across the step.
double refine_v_zero(const HermiteSeg& seg) {
    double lo = 0.0, hi = 1.0;
    double flo = seg.y0[1];
    for (int it = 0; it < 90; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = seg.eval(mid)[1];
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-16) break;
    }
    return 0.5 * (lo + hi);
}

template <typename F>
class AdaptiveDopri {
public:
    AdaptiveDopri(F rhs, Vec2 y0, double t0, double rtol, double atol, double dt_max,
                  double dt_init, double direction)
        : rhs_(rhs), y_(y0), t_(t0), rtol_(rtol), atol_(atol), dt_max_(dt_max),
          dir_(direction) {
        f_ = rhs_(y_);
        h_ = dt_init > 0.0 ? dt_init : 1e-6;
    }

    // Advances one accepted step; returns the interpolant for event handling.
    HermiteSeg step() {
        for (int attempt = 0; attempt < 80; ++attempt) {
            const double h = dir_ * std::min(h_, dt_max_);
            const StepResult r = dopri_step(rhs_, y_, f_, h, rtol_, atol_);
            if (r.err <= 1.0 || std::fabs(h) <= 1e-15 * std::max(1.0, std::fabs(t_))) {
                HermiteSeg seg{t_, h, y_, r.y, f_, r.f_end};
                t_ += h;
                y_ = r.y;
                f_ = r.f_end;
                const double fac =
                    std::clamp(0.9 * std::pow(std::max(r.err, 1e-10), -0.2), 0.2, 5.0);
                h_ = std::min(h_ * fac, dt_max_);
                return seg;
            }
            h_ *= std::clamp(0.9 * std::pow(r.err, -0.2), 0.1, 0.5);
        }
        throw IntegrationError("adaptive step: no acceptable step size found");
    }

    double t() const { return t_; }
    const Vec2& y() const { return y_; }

private:
    F rhs_;
    Vec2 y_;
    double t_;
    Vec2 f_;
    double rtol_, atol_, dt_max_;
    double dir_;
    double h_;
};

} // namespace

namespace {

// One full orbit at a fixed internal tolerance; the caller judges the
// measured drift against its budget.
void run_orbit(const PotentialSpec& pot, double E, const EnergyGeometry& geo,
               double dt_max, double rtol, double T_est, SimulationResult* res) {
    const auto rhs = [&pot](const Vec2& y) {
        return Vec2{phi(conjugate(pot.p), y[1]), -pot.dV(y[0])};
    };
    const double atol = rtol * std::max(1.0, geo.w2);
    AdaptiveDopri integ(rhs, Vec2{geo.w1, 0.0}, 0.0, rtol, atol, dt_max,
                        std::min(dt_max, 1e-6 * T_est), +1.0);

    res->trace.states.clear();
    res->trace.E0 = E;
    res->trace.max_drift = 0.0;
    res->trace.states.push_back({0.0, geo.w1, 0.0});

    int crossings = 0;
    double prev_v = 0.0;
    bool armed = false;  // the start sits on the section; arm after leaving it

    while (true) {
        const HermiteSeg seg = integ.step();
        const double t = integ.t();
        const double u = integ.y()[0];
        const double v = integ.y()[1];

        const double drift = std::fabs(hamiltonian(pot, u, v) - E);
        res->trace.max_drift = std::max(res->trace.max_drift, drift);
        res->trace.states.push_back({t, u, v});

        if (!armed) {
            if (std::fabs(v) > 0.0) {
                armed = true;
                prev_v = v;
            }
            continue;
        }

        if ((prev_v > 0.0 && v <= 0.0) || (prev_v < 0.0 && v >= 0.0)) {
            const double theta = refine_v_zero(seg);
            const Vec2 at = seg.eval(theta);
            const double t_cross = seg.t0 + theta * seg.h;
            ++crossings;
            if (crossings == 1) {
                if (!(at[0] > pot.A))
                    throw IntegrationError("simulate_period: first section crossing "
                                           "is not at the outer turning point");
                res->half_period = t_cross;
            } else {
                res->T = t_cross;
                res->trace.states.back() = {t_cross, at[0], at[1]};
                return;
            }
        }
        prev_v = v;

        if (t > 10.0 * T_est)
            throw IntegrationError("simulate_period: no return to the section "
                                   "within 10 predicted periods");
    }
}

} // namespace

SimulationResult simulate_period(const PotentialSpec& pot, double E, double dt_max,
                                 double tol) {
    const EnergyGeometry geo = turning_points(pot, E);

    double T_est;
    try {
        T_est = period_direct(pot, E, 1e-8).T;
    } catch (const QuadratureError& e) {
        T_est = e.value();
    }

    // The field is non-Lipschitz in v at the turning crossings (p > 2), where
    // the local error constants grow; calibrate the internal tolerance against
    // the measured drift instead of trusting a fixed mapping.
    const double drift_budget = 10.0 * tol * E;
    double rtol = 0.02 * tol * std::min(1.0, E);
    SimulationResult res;
    for (int attempt = 0; attempt < 5; ++attempt) {
        run_orbit(pot, E, geo, dt_max, rtol, T_est, &res);
        if (res.trace.max_drift <= drift_budget) return res;
        rtol /= 30.0;
        if (rtol < 1e-15) break;
    }
    throw IntegrationError("simulate_period: energy drift budget exceeded");
}

std::pair<double, double> integrate_flow(const PotentialSpec& pot,
                                         std::pair<double, double> uv0, double t0,
                                         double t1, const OdeOptions& opt) {
    if (t0 == t1) return uv0;
    const double dir = (t1 > t0) ? +1.0 : -1.0;
    const auto rhs = [&pot](const Vec2& y) {
        return Vec2{phi(conjugate(pot.p), y[1]), -pot.dV(y[0])};
    };
    const double span = std::fabs(t1 - t0);
    AdaptiveDopri integ(rhs, Vec2{uv0.first, uv0.second}, t0, opt.rtol, opt.atol,
                        std::min(opt.dt_max, span),
                        opt.dt_init > 0.0 ? opt.dt_init : 1e-6 * span, dir);
    while (dir * (t1 - integ.t()) > 1e-15 * span) {
        const double remaining = std::fabs(t1 - integ.t());
        const HermiteSeg seg = integ.step();
        if (dir * (integ.t() - t1) > 0.0) {
            // interpolate back onto t1 inside the overshooting step
            const double theta = remaining / std::fabs(seg.h);
            const Vec2 at = seg.eval(theta);
            return {at[0], at[1]};
        }
    }
    return {integ.y()[0], integ.y()[1]};
}

void write_trace_csv(std::ostream& os, const PotentialSpec& pot, const OrbitTrace& trace) {
    os << "t,u,v,H\n";
    os.precision(17);
    for (const PhaseState& s : trace.states)
        os << s.t << ',' << s.u << ',' << s.v << ',' << hamiltonian(pot, s.u, s.v)
           << '\n';
}

} // namespace plperiod
