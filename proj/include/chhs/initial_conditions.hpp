#pragma once

#include "chhs/config.hpp"
#include "chhs/model.hpp"

namespace chhs {

/// Pointwise magnitude above which a generated initial condition is rejected.
inline constexpr double kMaxInitialMagnitude = 10.0;

/// Builds phi0 from the ic block. The 0-mode is overwritten so that the mean is
/// exactly ic.mean (except for from_snapshot, which is taken verbatim).
/// Errors are reported as ConfigError; a missing snapshot as IoError.
State generate_ic(const RunConfig& cfg);

/// Coefficient of mode (i, j, k) in random_perturbation before scaling: uniform
/// in [-1, 1], a pure function of (seed, i, j, k) so that low modes agree across
/// resolutions.
double hashed_uniform(std::uint64_t seed, int i, int j, int k);

}  // namespace chhs
