#pragma once

#include <string>

namespace plperiod {

/// Outcome of a sign or monotonicity check on a grid. "fails" includes the
/// non-strict boundary case (a quantity that vanishes identically);
/// "inconclusive" is reserved for checks whose inputs are unavailable or
/// whose verdict did not stabilize under grid refinement.
enum class Verdict { holds, fails, inconclusive };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::fails: return "fails";
        default: return "inconclusive";
    }
}

} // namespace plperiod
