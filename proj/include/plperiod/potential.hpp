#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "plperiod/verdict.hpp"

namespace plperiod {

/// phi_p(s) = |s|^(p-2) s, the odd nonlinearity behind the p-Laplace
/// operator w -> (phi_p(w'))'. phi_p(0) = 0 by continuity, also for p < 2.
double phi(double p, double s);

/// Holder conjugate p' = p/(p-1), so 1/p + 1/p' = 1.
double conjugate(double p);

/// Exponent pair of the model equation (phi_p(w'))' + phi_q(w) - phi_p(w) = 0
/// with the derived quantities used throughout:
///   p' = p/(p-1),  m = q/p,  a = 1/p,  gamma_m = m^(1/(m-1)).
struct Exponents {
    double p;
    std::optional<double> q;

    double pprime() const { return conjugate(p); }
    double m() const;        ///< q/p (requires q)
    double a() const { return 1.0 / p; }
    double gamma_m() const;  ///< m^(1/(m-1))
};

/// (a, m) = (1/p, q/p) with a in (0, 1/2) and m in (1, 2); equivalently the
/// regime 2 < p < q < 2p.
bool admissible(double a, double m);

/// W(y) = y^m - m y + m - 1, the y = w^p image of the model potential:
/// q V(y^(1/p)) = W(y). W(1) = 0 and W(0) = W(gamma_m) = m - 1.
double W_of(double m, double y);

/// A potential well on [0, B]: interior minimum at A with V(A) = V'(A) = 0,
/// barrier height E* = V(0) = V(B), omega = sqrt(V''(A)) > 0. Closed orbits
/// of (phi_p(w'))' + V'(w) = 0 around (A, 0) exist for energies in (0, E*).
///
/// Derivative callbacks d2V/d3V may be empty; checks needing them report
/// "inconclusive" rather than differentiate numerically.
struct PotentialSpec {
    double p = 2.0;
    std::function<double(double)> V;
    std::function<double(double)> dV;
    std::function<double(double)> d2V;
    std::function<double(double)> d3V;
    double A = 1.0;
    double B = 2.0;
    double Estar = 1.0;
    double omega = 1.0;
    std::optional<Exponents> exps;  ///< set for the model family
    std::string name;

    bool has_d2() const { return static_cast<bool>(d2V); }
    bool has_d3() const { return static_cast<bool>(d3V); }
};

/// gamma(w, E) = p' (E - V(w)); strictly positive between the turning points
/// and zero at them.
double gamma_of(const PotentialSpec& pot, double w, double E);

/// Model potential V(w) = |w|^q/q - |w|^p/p + 1/p - 1/q, 1 < p < q, so that
/// V' = phi_q - phi_p. Then A = 1, E* = 1/p - 1/q, omega = sqrt(q - p) and
/// B = (q/p)^(1/(q-p)); in the y = w^p variable, B^p = gamma_m.
///
/// Near w = 1 the two power terms cancel to O((w-1)^2); evaluation switches
/// to the series sum_{k>=2} (q^(k-1) - p^(k-1)) log(w)^k / k! there so V
/// keeps full relative accuracy down to machine-scale energies.
PotentialSpec make_model_potential(double p, double q);

/// Isochronous oracle: V = (omega^2/2)(w-1)^2 with p = 2. T(E) = 2 pi/omega
/// for every E in (0, omega^2/2), and dT/dE = 0.
PotentialSpec make_harmonic_potential(double omega);

/// Turning points 0 < w1(E) < A < w2(E) < B of V(w) = E.
struct EnergyGeometry {
    double E;
    double w1;
    double w2;
};

/// Raised when root bracketing or uniqueness checks fail, which is the
/// numerical signature of a potential violating (w - A) V'(w) > 0.
class HypothesisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bracketed refinement of both turning points to 1e-13 relative tolerance.
/// Throws std::domain_error if E is outside (0, E*), HypothesisError if the
/// refined root is not the innermost crossing.
EnergyGeometry turning_points(const PotentialSpec& pot, double E);

struct HypothesisCheck {
    Verdict verdict = Verdict::inconclusive;
    double margin = 0.0;   ///< worst normalized strict-sign margin on the grid
    double witness = 0.0;  ///< grid point attaining it
};

struct HypothesisReport {
    HypothesisCheck h1;  ///< well shape: V(0)=V(B)=E*>0, V(A)=V'(A)=0, V''(A)>0, 0<V<E* between
    HypothesisCheck h2;  ///< liminf_{w->0+} |V'(w)| / w^(p-1) > 0
    HypothesisCheck h3;  ///< (w - A) V'(w) > 0 on (0, A) u (A, B)
    double h2_lower_bound = 0.0;  ///< min of |V'(w)|/w^(p-1) over w in (0, B/1e3]
};

/// Evaluates the three hypotheses on a composite geometric + uniform grid
/// over (0, B). grid_size >= 64.
HypothesisReport check_hypotheses(const PotentialSpec& pot, int grid_size = 512);

} // namespace plperiod
