#include "chhs/initial_conditions.hpp"

#include <cmath>

#include "chhs/snapshot.hpp"

namespace chhs {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void set_mean(SpectralField& phi, double mean) {
  phi[0] = mean * std::sqrt(phi.domain().volume());
}

void check_magnitude(const SpectralField& phi) {
  const ScalarField g = inverse_transform(phi, 2);
  if (!g.all_finite() || g.max_abs() > kMaxInitialMagnitude) {
    throw ConfigError("initial condition exceeds |phi| <= 10 pointwise (max " +
                          std::to_string(g.max_abs()) + ")",
                      0, "ic.amplitude");
  }
}

SpectralField constant_plus_modes(const RunConfig& cfg) {
  const Domain& d = cfg.domain;
  SpectralField phi(d);
  for (const ModeAmplitude& m : cfg.ic.modes) {
    for (int a = 0; a < 3; ++a) {
      const int limit = a < d.dim ? d.modes[a] : 1;
      if (m.index[a] >= limit) {
        throw ConfigError("ic.modes: index (" + std::to_string(m.index[0]) + "," +
                              std::to_string(m.index[1]) + "," + std::to_string(m.index[2]) +
                              ") out of range",
                          0, "ic.modes");
      }
    }
    phi.at(m.index[0], m.index[1], m.index[2]) += m.amplitude;
  }
  return phi;
}

SpectralField random_perturbation(const RunConfig& cfg) {
  const Domain& d = cfg.domain;
  SpectralField phi(d);
  phi.for_each_mode([&](int i, int j, int k, std::size_t n) {
    if (n == 0) return;
    phi[n] = cfg.ic.amplitude * hashed_uniform(cfg.ic.seed, i, j, k) *
             std::pow(1.0 + d.eigenvalue(i, j, k), -cfg.ic.q);
  });
  if (cfg.ic.target_h2) {
    const double h2 = sobolev_norm(phi, 2.0);
    if (h2 == 0.0) {
      throw ConfigError("ic.target_h2 set but the perturbation is zero", 0, "ic.target_h2");
    }
    phi *= *cfg.ic.target_h2 / h2;
  }
  return phi;
}

SpectralField tanh_interface(const RunConfig& cfg) {
  const Domain& d = cfg.domain;
  const double width = std::sqrt(2.0) * d.epsilon;
  const double amp = cfg.ic.amplitude == 0.0 ? 1.0 : cfg.ic.amplitude;
  const int axis = cfg.ic.axis;
  const double x0 = cfg.ic.x0;
  const ScalarField g = ScalarField::sample(
      d,
      [&](double x, double y, double z) {
        const double pos[3] = {x, y, z};
        return amp * std::tanh((pos[axis] - x0) / width);
      },
      2);
  return forward_transform(g);
}

}  // namespace

double hashed_uniform(std::uint64_t seed, int i, int j, int k) {
  std::uint64_t h = splitmix(seed);
  h = splitmix(h ^ static_cast<std::uint64_t>(i));
  h = splitmix(h ^ static_cast<std::uint64_t>(j));
  h = splitmix(h ^ static_cast<std::uint64_t>(k));
  // 53 random bits mapped to [-1, 1)
  return 2.0 * static_cast<double>(h >> 11) * 0x1.0p-53 - 1.0;
}

State generate_ic(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.ic.kind == IcKind::kFromSnapshot) {
    Snapshot snap = load_snapshot(cfg.ic.snapshot);
    if (!snap.state.domain().same_space(cfg.domain)) {
      throw ConfigError("ic.snapshot does not match the configured domain", 0, "ic.snapshot");
    }
    return State(snap.state.phi(), snap.state.time());
  }
  SpectralField phi(cfg.domain);
  switch (cfg.ic.kind) {
    case IcKind::kConstantPlusModes: phi = constant_plus_modes(cfg); break;
    case IcKind::kRandomPerturbation: phi = random_perturbation(cfg); break;
    case IcKind::kTanhInterface: phi = tanh_interface(cfg); break;
    case IcKind::kFromSnapshot: break;
  }
  set_mean(phi, cfg.ic.mean);
  check_magnitude(phi);
  return State(std::move(phi), 0.0);
}

}  // namespace chhs
