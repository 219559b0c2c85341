// Time stepping for the truncated Galerkin system.
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chhs/diagnostics.hpp"
#include "chhs/model.hpp"

namespace chhs {

enum class Scheme { kImexStabilized, kRk4Reference };

std::string scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);

struct IntegratorConfig {
  Scheme scheme = Scheme::kImexStabilized;
  double dt = 1e-3;
  double dt_min = 1e-9;
  double dt_max = 1e-1;
  /// Linear stabilization constant s of the IMEX scheme.
  double stabilization = 2.0;
  /// Allowed per-step energy increase; unset means 1e-10 (1 + |E|).
  std::optional<double> energy_tol;
  bool adapt = true;
  double t_end = 1.0;
  /// Invoke the checkpoint hook every this many accepted steps (0 = never).
  int checkpoint_every = 0;
  /// Times the run must land on exactly (snapshot times); steps are clipped.
  std::vector<double> stop_times;

  double growth = 1.2;
  double shrink = 0.5;
  int patience = 10;
  double blowup_threshold = 1e8;

  void validate() const;
  double tolerance_for(double energy) const;
};

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, long step, std::shared_ptr<const State> last)
      : std::runtime_error(what), step_(step), last_(std::move(last)) {}
  long step() const { return step_; }
  /// Last finite state before the failing step.
  const std::shared_ptr<const State>& last_state() const { return last_; }

 private:
  long step_;
  std::shared_ptr<const State> last_;
};

/// dt was halved below dt_min without producing an energy-decreasing step.
class DissipationError : public BlowUpError {
 public:
  using BlowUpError::BlowUpError;
};

/// IMEX stabilized step. Per mode:
///   (1 + dt eps^2 lambda^2 + dt s lambda) phi^{n+1}
///       = phi^n + dt (N(phi^n) + s lambda phi^n),
/// N = lap(phi^3 - phi) - v . grad phi. The 0-mode is copied unchanged.
State step_imex(const State& state, double dt, double stabilization,
                const ModelParams& p, long step_index = 0,
                double blowup_threshold = 1e8);

/// Classical RK4 on the full right-hand side with the 0-mode pinned.
State step_rk4(const State& state, double dt, const ModelParams& p,
               long step_index = 0, double blowup_threshold = 1e8);

/// Resumable stepper state: what a checkpoint must carry besides phi.
struct StepperState {
  double dt = 0.0;    // nominal (adaptive) step
  int streak = 0;     // consecutive accepted steps since the last growth
  long step = 0;      // accepted steps so far
};

struct RunCheckpoint {
  const State& state;
  const StepperState& stepper;
  const DiagnosticsRecord& record;
};

struct RunHooks {
  /// Called after every accepted step with the new record.
  std::function<void(const RunCheckpoint&)> on_step;
  /// Called every checkpoint_every steps and on every stop time.
  std::function<void(const RunCheckpoint&)> on_checkpoint;
};

struct Trajectory {
  std::vector<DiagnosticsRecord> records;
  std::vector<State> snapshots;  // states at cfg.stop_times
  std::size_t rejected_steps = 0;
  StepperState stepper;
  std::optional<State> final_state;
};

/// Integrates to cfg.t_end. The initial state is recorded first. With
/// `resume` set the stepper starts from a saved dt/streak/step.
Trajectory run(const State& initial, const IntegratorConfig& cfg,
               const ModelParams& p, const RunHooks& hooks = {},
               std::optional<StepperState> resume = {});

}  // namespace chhs
