#include "chhs/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace chhs {

namespace {

void check_finite(const SpectralField& phi, const State& last, long step,
                  double threshold) {
  if (!phi.all_finite()) {
    throw BlowUpError("step " + std::to_string(step) + ": non-finite coefficients",
                      step, std::make_shared<State>(last));
  }
  if (phi.max_abs() > threshold) {
    throw BlowUpError("step " + std::to_string(step) +
                          ": coefficient magnitude exceeded blow-up threshold",
                      step, std::make_shared<State>(last));
  }
}

const Evaluation& evaluation_or_blowup(const State& s, const ModelParams& p,
                                       long step) {
  try {
    return s.evaluation(p);
  } catch (const OverflowError& e) {
    throw BlowUpError("step " + std::to_string(step) + ": " + e.what(), step,
                      std::make_shared<State>(s));
  }
}

SpectralField rhs_or_blowup(const SpectralField& phi, const State& last,
                            const ModelParams& p, long step) {
  try {
    return evaluate(phi, p).rhs;
  } catch (const OverflowError& e) {
    throw BlowUpError("step " + std::to_string(step) + ": " + e.what(), step,
                      std::make_shared<State>(last));
  }
}

}  // namespace

std::string scheme_name(Scheme s) {
  return s == Scheme::kImexStabilized ? "imex_stabilized" : "rk4_reference";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "imex_stabilized" || name == "imex") return Scheme::kImexStabilized;
  if (name == "rk4_reference" || name == "rk4") return Scheme::kRk4Reference;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

void IntegratorConfig::validate() const {
  if (!(dt_min > 0.0) || !(dt_min <= dt) || !(dt <= dt_max)) {
    throw std::invalid_argument("integrator: require 0 < dt_min <= dt <= dt_max");
  }
  if (!(stabilization >= 0.0)) {
    throw std::invalid_argument("integrator: stabilization must be >= 0");
  }
  if (energy_tol && !(*energy_tol >= 0.0)) {
    throw std::invalid_argument("integrator: energy_tol must be >= 0");
  }
  if (!std::isfinite(t_end)) throw std::invalid_argument("integrator: t_end must be finite");
  if (checkpoint_every < 0) {
    throw std::invalid_argument("integrator: checkpoint_every must be >= 0");
  }
  if (!(growth >= 1.0) || !(shrink > 0.0 && shrink < 1.0) || patience < 1) {
    throw std::invalid_argument("integrator: bad adaptivity factors");
  }
}

double IntegratorConfig::tolerance_for(double energy) const {
  return energy_tol ? *energy_tol : 1e-10 * (1.0 + std::abs(energy));
}

State step_imex(const State& state, double dt, double stabilization,
                const ModelParams& p, long step_index, double blowup_threshold) {
  const Evaluation& ev = evaluation_or_blowup(state, p, step_index);
  const SpectralField& phi = state.phi();
  const Domain& d = phi.domain();
  const double eps2 = p.epsilon * p.epsilon;

  SpectralField next(d);
  auto out = next.coeffs();
  phi.for_each_mode([&](int i, int j, int k, std::size_t n) {
    const double lambda = d.eigenvalue(i, j, k);
    const double rhs = phi[n] + dt * (ev.explicit_part[n] + stabilization * lambda * phi[n]);
    out[n] = rhs / (1.0 + dt * eps2 * lambda * lambda + dt * stabilization * lambda);
  });
  out[0] = phi[0];
  check_finite(next, state, step_index, blowup_threshold);
  return State(std::move(next), state.time() + dt);
}

State step_rk4(const State& state, double dt, const ModelParams& p, long step_index,
               double blowup_threshold) {
  const SpectralField& phi = state.phi();
  const SpectralField k1 = evaluation_or_blowup(state, p, step_index).rhs;
  SpectralField stage = phi;
  stage.axpy(0.5 * dt, k1);
  const SpectralField k2 = rhs_or_blowup(stage, state, p, step_index);
  stage = phi;
  stage.axpy(0.5 * dt, k2);
  const SpectralField k3 = rhs_or_blowup(stage, state, p, step_index);
  stage = phi;
  stage.axpy(dt, k3);
  const SpectralField k4 = rhs_or_blowup(stage, state, p, step_index);

  SpectralField next = phi;
  next.axpy(dt / 6.0, k1);
  next.axpy(dt / 3.0, k2);
  next.axpy(dt / 3.0, k3);
  next.axpy(dt / 6.0, k4);
  next[0] = phi[0];
  check_finite(next, state, step_index, blowup_threshold);
  return State(std::move(next), state.time() + dt);
}

Trajectory run(const State& initial, const IntegratorConfig& cfg, const ModelParams& p,
               const RunHooks& hooks, std::optional<StepperState> resume) {
  cfg.validate();
  p.validate();

  Trajectory traj;
  StepperState& st = traj.stepper;
  st = resume.value_or(StepperState{cfg.dt, 0, 0});

  std::vector<double> stops;
  for (double t : cfg.stop_times) {
    if (t > initial.time() && t < cfg.t_end) stops.push_back(t);
  }
  stops.push_back(cfg.t_end);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  State current = initial;
  traj.records.push_back(record(current, p, 0.0));
  double energy = traj.records.back().energy;

  auto next_stop = stops.begin();
  while (next_stop != stops.end() && current.time() < cfg.t_end) {
    if (*next_stop <= current.time()) {
      ++next_stop;
      continue;
    }
    const double remaining = *next_stop - current.time();
    const bool landing = st.dt >= remaining - 1e-12 * std::max(1.0, std::abs(*next_stop));
    const double h = landing ? remaining : st.dt;
    const long index = st.step + 1;

    State candidate =
        cfg.scheme == Scheme::kImexStabilized
            ? step_imex(current, h, cfg.stabilization, p, index, cfg.blowup_threshold)
            : step_rk4(current, h, p, index, cfg.blowup_threshold);
    if (landing) candidate.set_time(*next_stop);

    if (cfg.adapt && !(ginzburg_landau_energy(candidate.phi(), p) <=
                       energy + cfg.tolerance_for(energy))) {
      ++traj.rejected_steps;
      st.dt *= cfg.shrink;
      st.streak = 0;
      if (st.dt < cfg.dt_min) {
        throw DissipationError("step " + std::to_string(index) +
                                   ": energy increase persists below dt_min",
                               index, std::make_shared<State>(current));
      }
      continue;
    }

    current = std::move(candidate);
    ++st.step;
    if (cfg.adapt && ++st.streak >= cfg.patience) {
      st.dt = std::min(st.dt * cfg.growth, cfg.dt_max);
      st.streak = 0;
    }

    DiagnosticsRecord rec = record(current, p, h);
    energy = rec.energy;
    traj.records.push_back(rec);
    const RunCheckpoint cp{current, st, traj.records.back()};
    if (hooks.on_step) hooks.on_step(cp);

    const bool at_stop = landing && current.time() == *next_stop;
    if (at_stop && *next_stop != cfg.t_end) traj.snapshots.push_back(current);
    const bool periodic = cfg.checkpoint_every > 0 && st.step % cfg.checkpoint_every == 0;
    if ((at_stop || periodic) && hooks.on_checkpoint) hooks.on_checkpoint(cp);
    if (at_stop) ++next_stop;
  }
  traj.final_state = current;
  return traj;
}

}  // namespace chhs
