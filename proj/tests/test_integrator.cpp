#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include "chhs/integrator.hpp"
#include "oracles.hpp"

namespace chhs {
namespace {

constexpr double kPi = std::numbers::pi;

SpectralField constant_field(const Domain& d, double c) {
  SpectralField f(d);
  f[0] = c * std::sqrt(d.volume());
  return f;
}

SpectralField smooth_state(const Domain& d, double mean, double amplitude, unsigned seed) {
  std::mt19937_64 rng(seed);
  SpectralField f = oracle::random_field(d, rng, amplitude, 1.5);
  f[0] = mean * std::sqrt(d.volume());
  return f;
}

double relative_l2(const SpectralField& a, const SpectralField& b) {
  return std::sqrt(norm_sq(a - b) / norm_sq(b));
}

bool bit_identical(const SpectralField& a, const SpectralField& b) {
  return a.size() == b.size() &&
         std::memcmp(a.coeffs().data(), b.coeffs().data(), a.size() * sizeof(double)) == 0;
}

TEST(IntegratorConfig, Validation) {
  IntegratorConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.dt = 1.0;  // above dt_max
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.dt_min = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.stabilization = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_EQ(parse_scheme("imex_stabilized"), Scheme::kImexStabilized);
  EXPECT_EQ(parse_scheme("rk4_reference"), Scheme::kRk4Reference);
  EXPECT_THROW(parse_scheme("euler"), std::invalid_argument);
  EXPECT_DOUBLE_EQ(IntegratorConfig{}.tolerance_for(-3.0), 4e-10);
}

TEST(StepImex, ConstantStateIsFixed) {
  const Domain d = Domain::rect(2.0, 1.0, 8, 8);
  const State s(constant_field(d, 0.35));
  for (double dt : {1e-6, 1e-2, 10.0}) {
    const State next = step_imex(s, dt, 2.0, ModelParams{});
    EXPECT_TRUE(bit_identical(next.phi(), s.phi()));
    EXPECT_DOUBLE_EQ(next.time(), dt);
  }
}

TEST(StepImex, LinearOneStepMap) {
  const Domain d = Domain::rect(kPi, 1.3, 8, 8);
  ModelParams p;
  p.epsilon = 0.7;
  for (double mean : {0.0, 0.7}) {
    for (double s : {0.0, 2.0}) {
      for (double dt : {1e-3, 0.1}) {
        const double a = 1e-6;
        SpectralField phi = constant_field(d, mean);
        phi.at(2, 1) = a;
        const double lambda = d.eigenvalue(2, 1, 0);
        const double eps2 = p.epsilon * p.epsilon;
        const double expected = a * (1.0 + dt * (-lambda * (3.0 * mean * mean - 1.0) + s * lambda)) /
                                (1.0 + dt * eps2 * lambda * lambda + dt * s * lambda);
        const State next = step_imex(State(phi), dt, s, p);
        EXPECT_NEAR(next.phi().at(2, 1), expected, 1e-5 * std::abs(expected) + 1e-18);
        EXPECT_EQ(next.phi()[0], phi[0]);
      }
    }
  }
}

TEST(StepImex, AgreesWithRk4Reference) {
  const Domain d = Domain::square(2.0 * kPi, 8);
  ModelParams p;
  const State initial(smooth_state(d, 0.2, 0.3, 1));
  State imex = initial;
  for (int n = 0; n < 100; ++n) imex = step_imex(imex, 1e-4, 2.0, p);
  State ref = initial;
  for (int n = 0; n < 10000; ++n) ref = step_rk4(ref, 1e-6, p);
  EXPECT_LE(relative_l2(imex.phi(), ref.phi()), 1e-4);
}

TEST(StepRk4, ConstantStateIsFixed) {
  const Domain d = Domain::box(1.0, 1.0, 1.0, 4, 4, 4);
  const State s(constant_field(d, -0.6));
  EXPECT_TRUE(bit_identical(step_rk4(s, 1e-3, ModelParams{}).phi(), s.phi()));
}

TEST(StepRk4, FourthOrderConvergence) {
  const Domain d = Domain::square(2.0 * kPi, 8);
  ModelParams p;
  const State initial(smooth_state(d, 0.1, 0.3, 2));
  const double t = 0.08;
  auto integrate = [&](double dt) {
    State s = initial;
    const int steps = static_cast<int>(std::lround(t / dt));
    for (int n = 0; n < steps; ++n) s = step_rk4(s, dt, p);
    return s.phi();
  };
  const SpectralField ref = integrate(1e-4);
  const double e1 = std::sqrt(norm_sq(integrate(4e-3) - ref));
  const double e2 = std::sqrt(norm_sq(integrate(2e-3) - ref));
  const double ratio = e1 / e2;
  EXPECT_GE(ratio, 8.0);
  EXPECT_LE(ratio, 32.0);
}

TEST(StepRk4, MassPinnedOverManySteps) {
  const Domain d = Domain::rect(2.0 * kPi, kPi, 8, 8);
  ModelParams p;
  State s(smooth_state(d, 0.3, 0.4, 3));
  const double mean = s.mean();
  for (int n = 0; n < 1000; ++n) {
    s = step_rk4(s, 1e-4, p);
    ASSERT_LE(std::abs(s.mean() - mean), 1e-14);
  }
}

TEST(StepRk4, InstabilityIsReportedAsBlowUp) {
  const Domain d = Domain::square(1.0, 16);
  ModelParams p;
  const State initial(smooth_state(d, 0.0, 0.1, 4));
  IntegratorConfig cfg;
  cfg.scheme = Scheme::kRk4Reference;
  cfg.adapt = false;
  cfg.dt = 1e-2;
  cfg.t_end = 100.0;
  try {
    run(initial, cfg, p);
    FAIL() << "expected blow-up";
  } catch (const BlowUpError& e) {
    EXPECT_GT(e.step(), 0);
    ASSERT_TRUE(e.last_state());
    EXPECT_TRUE(e.last_state()->phi().all_finite());
    EXPECT_NE(std::string(e.what()).find("step"), std::string::npos);
  }
}

TEST(Run, ConstantInitialConditionStaysPut) {
  const Domain d = Domain::rect(2.0, 1.0, 8, 8);
  IntegratorConfig cfg;
  cfg.t_end = 0.1;
  cfg.dt = 1e-2;
  const State initial(constant_field(d, 0.5));
  const Trajectory tr = run(initial, cfg, ModelParams{});
  ASSERT_GT(tr.records.size(), 5u);
  for (const auto& r : tr.records) EXPECT_EQ(r.energy, tr.records.front().energy);
  EXPECT_TRUE(bit_identical(tr.final_state->phi(), initial.phi()));
  EXPECT_EQ(tr.rejected_steps, 0u);
}

TEST(Run, EnergyNonIncreasingNearStableMean) {
  const Domain d = Domain::square(2.0 * kPi, 16);
  IntegratorConfig cfg;
  cfg.t_end = 2.0;
  cfg.dt = 1e-2;
  const State initial(smooth_state(d, 0.7, 0.05, 5));
  const Trajectory tr = run(initial, cfg, ModelParams{});
  for (std::size_t n = 1; n < tr.records.size(); ++n) {
    const double e = tr.records[n - 1].energy;
    EXPECT_LE(tr.records[n].energy, e + cfg.tolerance_for(e));
    EXPECT_LE(std::abs(tr.records[n].mass - tr.records[0].mass), 1e-12);
    EXPECT_GT(tr.records[n].time, tr.records[n - 1].time);
  }
  EXPECT_EQ(tr.records.back().time, cfg.t_end);
}

TEST(Run, SpinodalCoarseningDissipates) {
  const Domain d = Domain::square(2.0 * kPi, 16);
  IntegratorConfig cfg;
  cfg.t_end = 5.0;
  cfg.dt = 1e-2;
  cfg.dt_max = 0.5;
  std::mt19937_64 rng(6);
  SpectralField phi = oracle::random_field(d, rng, 0.05);
  phi[0] = 0.0;
  const Trajectory tr = run(State(phi), cfg, ModelParams{});
  EXPECT_LT(tr.records.back().energy, tr.records.front().energy);
  for (std::size_t n = 1; n < tr.records.size(); ++n) {
    const double e = tr.records[n - 1].energy;
    EXPECT_LE(tr.records[n].energy, e + cfg.tolerance_for(e));
  }
}

TEST(Run, RejectsEnergyIncreasingSteps) {
  // Without stabilization a large step from a far-from-equilibrium state
  // overshoots.
  const Domain d = Domain::square(2.0 * kPi, 16);
  IntegratorConfig cfg;
  cfg.stabilization = 0.0;
  cfg.dt = 5.0;
  cfg.dt_max = 5.0;
  cfg.t_end = 20.0;
  std::mt19937_64 rng(7);
  SpectralField phi = oracle::random_field(d, rng, 2.0);
  phi[0] = 0.0;
  const Trajectory tr = run(State(phi), cfg, ModelParams{});
  EXPECT_GT(tr.rejected_steps, 0u);
  for (std::size_t n = 1; n < tr.records.size(); ++n) {
    const double e = tr.records[n - 1].energy;
    EXPECT_LE(tr.records[n].energy, e + cfg.tolerance_for(e));
  }

  cfg.dt_min = cfg.dt;
  try {
    run(State(phi), cfg, ModelParams{});
    FAIL() << "expected dissipation failure";
  } catch (const DissipationError& e) {
    ASSERT_TRUE(e.last_state());
    EXPECT_TRUE(bit_identical(e.last_state()->phi(), phi));
  }
}

TEST(Run, StepGrowsAfterPatience) {
  const Domain d = Domain::square(2.0 * kPi, 8);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  const Trajectory tr = run(State(smooth_state(d, 0.7, 0.01, 8)), cfg, ModelParams{});
  EXPECT_EQ(tr.records[10].dt, 1e-3);
  EXPECT_NEAR(tr.records[11].dt, 1.2e-3, 1e-18);
  EXPECT_LE(tr.stepper.dt, cfg.dt_max);
}

TEST(Run, LandsOnStopTimesAndSnapshots) {
  const Domain d = Domain::square(2.0 * kPi, 8);
  IntegratorConfig cfg;
  cfg.dt = 0.03;
  cfg.t_end = 0.5;
  cfg.stop_times = {0.1, 0.25, 0.5, 0.9};
  std::vector<double> checkpoints;
  RunHooks hooks;
  hooks.on_checkpoint = [&](const RunCheckpoint& cp) { checkpoints.push_back(cp.state.time()); };
  const Trajectory tr = run(State(smooth_state(d, 0.7, 0.05, 9)), cfg, ModelParams{}, hooks);
  ASSERT_EQ(tr.snapshots.size(), 2u);
  EXPECT_EQ(tr.snapshots[0].time(), 0.1);
  EXPECT_EQ(tr.snapshots[1].time(), 0.25);
  EXPECT_EQ(checkpoints, (std::vector<double>{0.1, 0.25, 0.5}));
  EXPECT_EQ(tr.final_state->time(), 0.5);
  // Landing does not disturb the nominal step.
  EXPECT_EQ(tr.stepper.dt, 0.03 * std::pow(1.2, static_cast<int>(tr.stepper.step / 10)));
}

TEST(Run, ResumeIsBitIdentical) {
  const Domain d = Domain::square(2.0 * kPi, 16);
  const ModelParams p;
  IntegratorConfig cfg;
  cfg.dt = 0.013;
  cfg.t_end = 1.0;
  cfg.stop_times = {0.4};
  std::mt19937_64 rng(10);
  SpectralField phi = oracle::random_field(d, rng, 0.1);
  phi[0] = 0.0;
  const State initial(phi);
  const Trajectory whole = run(initial, cfg, p);

  IntegratorConfig first = cfg;
  first.t_end = 0.4;
  const Trajectory a = run(initial, first, p);
  const Trajectory b = run(*a.final_state, cfg, p, {}, a.stepper);
  EXPECT_TRUE(bit_identical(b.final_state->phi(), whole.final_state->phi()));
  EXPECT_EQ(a.records.size() + b.records.size() - 1, whole.records.size());
  EXPECT_EQ(b.stepper.step, whole.stepper.step);
}

TEST(Run, Deterministic) {
  const Domain d = Domain::box(2.0, 2.0, 2.0, 8, 8, 8);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.05;
  const State initial(smooth_state(d, 0.1, 0.2, 11));
  const Trajectory a = run(initial, cfg, ModelParams{});
  const Trajectory b = run(initial, cfg, ModelParams{});
  ASSERT_EQ(a.records.size(), b.records.size());
  EXPECT_TRUE(bit_identical(a.final_state->phi(), b.final_state->phi()));
  for (std::size_t n = 0; n < a.records.size(); ++n) {
    EXPECT_EQ(a.records[n].energy, b.records[n].energy);
  }
}

}  // namespace
}  // namespace chhs
