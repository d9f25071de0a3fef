#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "plperiod/potential.hpp"

namespace plperiod {

enum class PeriodMethod { w_integral, theta_integral, chow_wang, theta_derivative, ode };

std::string to_string(PeriodMethod m);

struct PeriodSample {
    double E = 0.0;
    double T = 0.0;
    std::optional<double> dT_dE;
    PeriodMethod method = PeriodMethod::w_integral;
    double err_estimate = 0.0;
};

/// Raised when a formula route is not valid for the given exponent
/// (the theta-space routes require p >= 2).
class UnsupportedRouteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Minimal period by the energy integral
///
///   T(E) = 2 / p'^(1/p) * integral_{w1}^{w2} (E - V(w))^(-1/p) dw,
///
/// tanh-sinh on each half [w1, A], [A, w2] so the algebraic endpoint
/// singularities cost nothing. err_estimate <= tol * T on success.
PeriodSample period_direct(const PotentialSpec& pot, double E, double tol = 1e-10);

/// Chicone-style parametrization sqrt(E) sin(theta) = h(y) in the variable
/// y = w^p, where
///
///   h(y) = sign(y - A^p) sqrt(V(y^(1/p))),   h(A^p) = 0.
///
/// h is strictly increasing on (y1(E), y2(E)), with y(-pi/2) = y1,
/// y(0) = A^p, y(pi/2) = y2.
class ThetaParametrization {
public:
    ThetaParametrization(const PotentialSpec& pot, double E);

    double E() const { return E_; }
    double y1() const { return y1_; }
    double y2() const { return y2_; }
    double Ap() const { return Ap_; }
    double p() const { return p_; }

    double h(double y) const;
    double dh(double y) const;   ///< dh/dy, positive on both sides of A^p
    double d2h(double y) const;

    /// Solve sqrt(E) sin(theta) = h(y) for y, theta in [-pi/2, pi/2];
    /// safeguarded Newton on the branch selected by sign(theta).
    double invert(double theta) const;
    /// Same, given the target value t = sqrt(E) sin(theta) directly.
    double invert_target(double t) const;

    /// c_p = 2 / (p * p'^(1/p)), the prefactor of the theta-form of T(E).
    static double c_p(double p);

private:
    std::function<double(double)> V_, dV_, d2V_;
    double p_, Ap_, E_, y1_, y2_;
};

/// Minimal period via the theta integral
///
///   T(E) = c_p E^(1/2 - 1/p) * integral (cos theta)^(1 - 2/p) / (y^(1/p') h'(y)) dtheta.
///
/// Substituting x = sin(theta) turns the cosine power into the weight
/// (1 - x^2)^(-1/p), handled exactly by a Gauss-Jacobi rule, leaving a
/// smooth factor; convergence is spectral in n_nodes (nodes per half-interval).
/// Requires p >= 2: for p in (1, 2) the theta integrand is singular and the
/// route refuses (use period_direct).
PeriodSample period_theta(const PotentialSpec& pot, double E, int n_nodes = 48);

/// dT/dE by the Chow-Wang route
///
///   dT/dE = 2/(p' E) * integral R(w) / (gamma(w,E)^(1/p) V'(w)^2) dw,
///   R(w) = V'(w)^2 - p' V(w) V''(w).
///
/// R/V'^2 has a removable 0/0 at w = A with limit 1 - p'/2; inside
/// |w - A| < 1e-4 (B - A) the ratio is patched by that limit, where the raw
/// quotient has lost half its digits. Requires V'' and p >= 2.
PeriodSample dperiod_chow_wang(const PotentialSpec& pot, double E, double tol = 1e-10);

/// dT/dE by differentiating the theta integral:
///   T'(E)/T(E) = (p-2)/(2p) * 1/E + J'(E)/J(E),
///   J'(E) = -1/(2 sqrt(E)) * integral K(y) (cos theta)^(1-2/p) sin(theta) dtheta,
/// with K from the criteria module, on the same Gauss-Jacobi grid as
/// period_theta. Requires p >= 2.
PeriodSample dperiod_theta(const PotentialSpec& pot, double E, int n_nodes = 48);

/// Centered finite difference of period_direct, the reference oracle for the
/// two analytic derivative routes. Step h defaults to 1e-4 * E*, shrunk when
/// E sits near an end of (0, E*).
PeriodSample dperiod_finite_difference(const PotentialSpec& pot, double E,
                                       double h = 0.0, double tol = 1e-11);

} // namespace plperiod
