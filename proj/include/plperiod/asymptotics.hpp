#pragma once

#include <vector>

#include "plperiod/potential.hpp"

namespace plperiod {

/// Small-energy law of the period:
///   T(E) ~ C(p, omega) E^(1/2 - 1/p),
///   C(p, omega) = 2 sqrt(2 pi) Gamma(1 - 1/p) / (p'^(1/p) omega Gamma(3/2 - 1/p)).
/// For p = 2 the exponent vanishes and C = 2 pi / omega.
double small_e_coefficient(double p, double omega);

struct AsymptoticFit {
    double exponent_fit = 0.0;
    double exponent_theory = 0.0;
    double coeff_fit = 0.0;
    double coeff_theory = 0.0;
    double rel_err = 0.0;  ///< |coeff_fit - coeff_theory| / coeff_theory
};

/// Log-log least-squares fit T(E) ~ c E^alpha over n log-spaced energies in
/// [E_lo, E_hi] (one decade by default use). Throws std::invalid_argument on
/// a degenerate abscissa set.
AsymptoticFit asymptotic_report(const PotentialSpec& pot, double E_lo, double E_hi,
                                int n = 10, double tol = 1e-10);

/// T(E* (1 - 10^-j)) for j = j_min..j_max, the homoclinic approach sequence.
/// Strictly increasing values are the numerical signature of the blow-up
/// (the divergence is logarithmic; no rate is asserted).
std::vector<double> blowup_probe(const PotentialSpec& pot, int j_min = 2, int j_max = 8,
                                 double tol = 1e-10);

} // namespace plperiod
