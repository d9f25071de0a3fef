#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "plperiod/potential.hpp"
#include "plperiod/verdict.hpp"

namespace plperiod {

struct Witness {
    double primary = 0.0;
    double secondary = std::numeric_limits<double>::quiet_NaN();  // NaN if 1-D
};

/// Result of one monotonicity criterion evaluated on a grid.
/// "holds" means strict sign with margin above tolerance at every grid point.
struct CriterionReport {
    std::string criterion;
    Verdict verdict = Verdict::inconclusive;
    double worst_margin = 0.0;
    Witness witness;
    std::string note;
};

/// Work variables of the exponent-only criteria: a = 1/p, m = q/p,
/// z = y^(m-1), x = y^(1/p), and Phi(x) = x^(mp) - m x^p + m - 1, which
/// equals W(y) under y = x^p.
struct CriterionContext {
    double a;
    double m;

    double p() const { return 1.0 / a; }
    double q() const { return m / a; }
    double z_of(double y) const { return std::pow(y, m - 1.0); }
    double x_of(double y) const { return std::pow(y, a); }
    double Phi(double x) const;
    double dPhi(double x) const;
    double d2Phi(double x) const;
    double d3Phi(double x) const;
};

// --- Chow-Wang ---------------------------------------------------------------

/// R(w) = V'(w)^2 - p' V(w) V''(w). R positive on (0,A) u (A,B) (together
/// with V'' > 0) forces T increasing; equivalently V |V'|^(-p') increasing.
double r_of(const PotentialSpec& pot, double w);

/// Sign of R on a grid over (0, B) minus 1e-3 B neighbourhoods of {0, A, B},
/// plus the V'' > 0 side condition.
CriterionReport chow_wang_report(const PotentialSpec& pot, int grid = 2048);

// --- Chicone ------------------------------------------------------------------

/// (V / V'^2)'' evaluated from analytic derivatives (requires V''').
double chicone_second_derivative(const PotentialSpec& pot, double w);

/// Convexity of V / V'^2 on the grid; inconclusive when V''' is missing.
CriterionReport chicone_report(const PotentialSpec& pot, int grid = 2048);

// --- K criterion ---------------------------------------------------------------

/// K(y) = (y^2 h'' + (1/p') y h') / (y^(2 + 1/p') h'^3)
///      = -(1/h') d/dy [ 1 / (y^(1/p') h') ],
/// built from analytic h', h'' (hence V, V', V''). At y = A^p the removable
/// point is filled by one-sided extrapolation.
double k_of(const PotentialSpec& pot, double y);

/// Exact alternative route for the model family:
/// K(y) = -2 m p^2 d/dx (Phi / Phi'^2) at x = y^(1/p).
double k_phi_route(const Exponents& exps, double y);

/// K decreasing on [A^p, y2(E_max)] implies J' > 0 and T increasing (p > 2).
/// Checked on a refining grid; verdicts at both resolutions must agree.
CriterionReport k_monotonicity_report(const PotentialSpec& pot, double E_max,
                                      int grid = 1024);

// --- m > 2 convexity certificates ------------------------------------------------

/// F(y) = -m^2 + 2m(m-1)^2 y^(m-2) - 2m^2 (m-2) y^(m-1) + m(m-2) y^(2m-2);
/// equals 2 W W'' - W'^2 exactly, so sign((y-1) F(y)) = sign(h''(y)).
double F_certificate(double m, double y);

/// G(y) = 2(m-1)(m-2) - m(2m-1) y + 2(m-1)(2m-1) y^(m-1)
///        - 2(m-2)(2m-1) y^m + (m-2) y^(2m-1);
/// the numerator of ((h')^-2)'' equals m^2 (m-1) y^(m-3) G(y), so
/// sign(G) = sign(((h')^-2)''). G(1) = G'(1) = 0 and
/// G'' = 2(m-1)(m-2)(2m-1) y^(m-3) W(y).
double G_certificate(double m, double y);
double G_certificate_derivative(double m, double y);

std::pair<double, double> fg_convexity(double m, double y);

/// h convex on [0, gamma_m]: certificate sign(y-1) F(y) >= 0.
CriterionReport h_convexity_report(double m, int grid = 4096);

/// 1/h'^2 convex on [0, gamma_m]: certificate G(y) >= 0.
CriterionReport inv_hprime2_convexity_report(double m, int grid = 4096);

// --- The quartic-structure polynomial f -------------------------------------------

/// f(a, m, y, z), quartic in z, quadratic in a, linear in y; -K'(y) has the
/// same sign as p^2 y^2 f(a, m, y, y^(m-1)).
double f_of(double a, double m, double y, double z);

/// f(a, m, 1+e, (1+e)^(m-1)) assembled from exact small differences. On the
/// curve the value is O(e^4) while the plain polynomial builds it from O(1)
/// terms, losing all leading digits for |e| below ~1e-2; this form keeps
/// full relative accuracy and backs the fourth-difference oracle.
double f_near_one(double a, double m, double e);

/// c_{m,a} = 12 m a (a - m - 1) + m (2m^2 + 7m + 2) >= m(m+1)(2m-1) > 0.
double c_ma(double a, double m);

/// Leading Taylor coefficient of f(a,m,y,y^(m-1)) at y = 1:
/// f = (1/12)(m-1)^3 c_{m,a} (y-1)^4 + O((y-1)^5).
double taylor_coeff_near_1(double a, double m);

/// Scan of f(a, m, y, y^(m-1)) >= 0 on (0, gamma_m]. Inside |y-1| < 1e-2 the
/// quartic Taylor model decides the sign; raw evaluation there is pure
/// cancellation noise.
CriterionReport f_nonneg_scan(double a, double m, int n_points = 4000);

// --- Elimination / discriminant -----------------------------------------------------

/// f is linear in y; solving f(a,m,y,z) = 0 for y gives y = n/d with the
/// polynomials n(a,m,z), d(a,m,z) below. d == 0 is reported, not fatal.
struct Elimination {
    double y;
    double n;
    double d;
};
Elimination elimination(double a, double m, double z);

/// delta(a,m) = -3 (a-1)^2 (m-1)^2 (a-m)^2 beta(a,m),
/// beta(a,m) = 5a^2 - 10a(m+1) - 3m^2 + 14m - 3.
struct Discriminant {
    double delta;
    double beta;
};
Discriminant discriminant(double a, double m);

} // namespace plperiod
