#pragma once

// Central-difference gradient verification. The numeric side touches only
// forward evaluations, so it stays independent of the reverse pass it checks.

#include <cstdint>
#include <functional>

#include "resmask/tape.hpp"

namespace resmask::ad {

struct GradCheckResult {
    double max_rel_err = 0.0;
    int worst_pid = -1;
    int worst_index = -1;
};

/// `build_loss` records the computation on the given tape and returns the
/// scalar loss; it must be deterministic given the current parameter values.
/// Compares the reverse-pass gradient against (f(p+h) - f(p-h)) / 2h on up to
/// `samples_per_tensor` coordinates per parameter (all coordinates when the
/// tensor is at most that large; sampled without replacement otherwise).
/// Relative error uses |analytic - numeric| / (|analytic| + |numeric| + 1e-12).
GradCheckResult grad_check(ParamStore& params,
                           const std::function<VarId(Tape&)>& build_loss,
                           double step = 1e-5,
                           int samples_per_tensor = 32,
                           std::uint64_t seed = 0);

}  // namespace resmask::ad
