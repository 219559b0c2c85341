// Empirical size of the perturbation basin around a constant state: bisection
// over the amplitude of a fixed perturbation shape.
#pragma once

#include <vector>

#include "chhs/integrator.hpp"

namespace chhs {

struct BasinTrial {
  double amplitude = 0.0;
  double initial_h2_sq = 0.0;  // |phi0 - mean|_H2^2
  double final_h2_sq = 0.0;
  bool decayed = false;
};

struct BasinProbe {
  /// Largest amplitude seen to decay and smallest seen not to.
  double decays_at = 0.0;
  double fails_at = 0.0;
  /// |phi0 - mean|_H2^2 at the two bracketing amplitudes.
  double decays_h2_sq = 0.0;
  double fails_h2_sq = 0.0;
  std::vector<BasinTrial> trials;
};

struct BasinOptions {
  double low = 0.0;   // amplitude expected to decay
  double high = 1.0;  // amplitude expected not to
  int iterations = 8;
  /// A trial decays when |phi(t_end) - mean|_H2 <= ratio * |phi0 - mean|_H2.
  double ratio = 1e-2;
};

/// Runs phi0 = mean + amplitude * shape for each probed amplitude. `shape`'s
/// 0-mode is ignored. Throws std::invalid_argument if the bracket does not
/// straddle the boundary.
BasinProbe probe_decay_basin(double mean, const SpectralField& shape,
                             const IntegratorConfig& cfg, const ModelParams& p,
                             const BasinOptions& opt = {});

}  // namespace chhs
