#pragma once

#include <iosfwd>
#include <stdexcept>
#include <utility>
#include <vector>

#include "plperiod/potential.hpp"

namespace plperiod {

struct PhaseState {
    double t;
    double u;  ///< position (= w)
    double v;  ///< momentum (= phi_p(w'))
};

/// Time-ordered record of one simulation, with the conserved-energy ledger.
struct OrbitTrace {
    std::vector<PhaseState> states;
    double E0 = 0.0;
    double max_drift = 0.0;  ///< max |H(u,v) - E0| seen; reported, never hidden
};

/// H(u, v) = V(u) + |v|^p' / p'.
double hamiltonian(const PotentialSpec& pot, double u, double v);

/// Hamiltonian vector field: u' = phi_{p'}(v), v' = -V'(u). Continuous
/// everywhere, non-Lipschitz in v at v = 0 when p > 2 (p' < 2).
std::pair<double, double> vector_field(const PotentialSpec& pot, double u, double v);

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimulationResult {
    double T = 0.0;           ///< measured return time to {v = 0, u < A}
    double half_period = 0.0; ///< time of the first v = 0 crossing (u > A)
    OrbitTrace trace;
};

/// Integrates one closed orbit starting from (w1(E), 0) with an adaptive
/// embedded Dormand-Prince 5(4) pair; v = 0 crossings are bracketed by sign
/// change and refined on the cubic Hermite interpolant of the accepted step.
/// The first step is capped at 1e-6 of the predicted period: the field is
/// non-Lipschitz in v at the start, but the orbit leaves transversally.
///
/// Throws IntegrationError when |H - E| exceeds 10 tol E, or when no return
/// occurs within 10 predicted periods.
SimulationResult simulate_period(const PotentialSpec& pot, double E,
                                 double dt_max = 1e30, double tol = 1e-8);

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double dt_max = 1e30;
    double dt_init = 0.0;  ///< 0: choose automatically
};

/// Generic flow map: integrates from t0 to t1 (either direction).
std::pair<double, double> integrate_flow(const PotentialSpec& pot,
                                         std::pair<double, double> uv0, double t0,
                                         double t1, const OdeOptions& opt = {});

/// CSV with header "t,u,v,H".
void write_trace_csv(std::ostream& os, const PotentialSpec& pot, const OrbitTrace& trace);

} // namespace plperiod
