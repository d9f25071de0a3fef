#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace plperiod {

/// Thrown when an adaptive rule exhausts its refinement budget.
/// Carries the best value and error estimate reached.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& msg, double value, double error)
        : std::runtime_error(msg), value_(value), error_(error) {}
    double value() const noexcept { return value_; }
    double error() const noexcept { return error_; }

private:
    double value_;
    double error_;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  ///< difference between the last two refinement levels
    int levels = 0;
};

/// Integrand for tanh-sinh: receives the abscissa plus its exact distances
/// to both endpoints. Near an endpoint the abscissa itself has rounded to
/// machine precision of the endpoint value while the distance is still exact
/// to double-exponential depth; singular factors must be built from the
/// distance or the tail mass (~eps^(1-1/p) of the integral) is lost.
using TsIntegrand = std::function<double(double x, double dist_a, double dist_b)>;

/// Tanh-sinh (double-exponential) quadrature on [a, b].
///
/// The substitution x = c + d tanh((pi/2) sinh t) compresses both endpoints
/// double-exponentially, so integrands with integrable algebraic endpoint
/// singularities (x - a)^alpha, alpha > -1, converge at full speed.
/// Non-finite integrand values are skipped.
///
/// Converged when the level-to-level difference drops to
/// max(rel_tol * |I|, abs_tol); otherwise throws QuadratureError.
QuadResult tanh_sinh(const TsIntegrand& f, double a, double b,
                     double rel_tol, double abs_tol = 0.0, int max_level = 12);

/// Convenience overload for integrands that are regular enough to be
/// evaluated from the abscissa alone.
QuadResult tanh_sinh(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol = 0.0, int max_level = 12);

/// Nodes and weights of an n-point Gaussian rule on [-1, 1].
struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
};

/// Gauss-Jacobi rule for the weight (1-x)^alpha (1+x)^beta, alpha, beta > -1,
/// computed by Golub-Welsch on the symmetric tridiagonal Jacobi matrix.
QuadRule gauss_jacobi(int n, double alpha, double beta);

/// Gauss-Legendre rule (Jacobi with alpha = beta = 0).
QuadRule gauss_legendre(int n);

/// Bracketed root refinement (Brent). Requires sign(f(a)) != sign(f(b)).
/// Stops when the bracket shrinks to rel_tol * max(1, |root|).
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double rel_tol = 1e-13, int max_iter = 200);

} // namespace plperiod
