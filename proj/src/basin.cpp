#include "chhs/basin.hpp"

#include <cmath>
#include <stdexcept>

namespace chhs {

namespace {

BasinTrial trial(double mean, const SpectralField& shape, double amplitude,
                 const IntegratorConfig& cfg, const ModelParams& p, double ratio) {
  SpectralField phi0 = amplitude * fluctuation(shape);
  phi0[0] = mean * std::sqrt(shape.domain().volume());
  BasinTrial t;
  t.amplitude = amplitude;
  const double h0 = sobolev_norm(fluctuation(phi0), 2.0);
  t.initial_h2_sq = h0 * h0;
  const Trajectory tr = run(State(phi0), cfg, p);
  const double h1 = tr.records.back().h2_dist;
  t.final_h2_sq = h1 * h1;
  t.decayed = h1 <= ratio * h0;
  return t;
}

}  // namespace

BasinProbe probe_decay_basin(double mean, const SpectralField& shape,
                             const IntegratorConfig& cfg, const ModelParams& p,
                             const BasinOptions& opt) {
  if (!(opt.low < opt.high)) throw std::invalid_argument("basin probe: need low < high");
  BasinProbe probe;
  BasinTrial lo = trial(mean, shape, opt.low, cfg, p, opt.ratio);
  BasinTrial hi = trial(mean, shape, opt.high, cfg, p, opt.ratio);
  probe.trials = {lo, hi};
  if (!lo.decayed || hi.decayed) {
    throw std::invalid_argument("basin probe: amplitudes do not bracket the basin edge");
  }
  for (int it = 0; it < opt.iterations; ++it) {
    const BasinTrial mid =
        trial(mean, shape, 0.5 * (lo.amplitude + hi.amplitude), cfg, p, opt.ratio);
    probe.trials.push_back(mid);
    (mid.decayed ? lo : hi) = mid;
  }
  probe.decays_at = lo.amplitude;
  probe.fails_at = hi.amplitude;
  probe.decays_h2_sq = lo.initial_h2_sq;
  probe.fails_h2_sq = hi.initial_h2_sq;
  return probe;
}

}  // namespace chhs
