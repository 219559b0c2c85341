// Right-hand side of the Cahn-Hilliard-Hele-Shaw system
//
//   phi_t + v . grad phi = lap mu
//   mu = phi^3 - phi - eps^2 lap phi
//   v  = -grad P + gamma mu grad phi,   div v = 0,   v.n = 0,
//
// restricted to the truncated cosine space. Pointwise products are formed on
// a grid padded by `dealias_padding` and truncated back, so with padding 2
// every product below is the exact Galerkin projection.
#pragma once

#include <optional>
#include <stdexcept>

#include "chhs/spectral.hpp"

namespace chhs {

class OverflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelParams {
  double epsilon = 1.0;
  double gamma = 1.0;
  bool advection_enabled = true;
  int dealias_padding = 2;

  static ModelParams from_domain(const Domain& d);
  void validate() const;
};

double double_well(double phi);
double double_well_prime(double phi);
double double_well_second(double phi);

/// Everything one right-hand-side evaluation produces.
struct Evaluation {
  SpectralField mu;
  VectorField velocity;
  /// Full Galerkin right-hand side lap mu - P_N(v . grad phi), 0-mode zeroed.
  SpectralField rhs;
  /// The part of rhs not containing the biharmonic term:
  /// lap(P_N(phi^3) - phi) - P_N(v . grad phi).
  SpectralField explicit_part;
  /// 0-mode of rhs before it was zeroed.
  double mass_residual = 0.0;
};

Evaluation evaluate(const SpectralField& phi, const ModelParams& p);

SpectralField chemical_potential(const SpectralField& phi, const ModelParams& p);
VectorField velocity(const SpectralField& phi, const SpectralField& mu,
                     const ModelParams& p);
/// Mean-zero pressure with -grad P + gamma P_N(mu grad phi) = velocity.
SpectralField pressure(const SpectralField& phi, const SpectralField& mu,
                       const ModelParams& p);
SpectralField rhs(const SpectralField& phi, const ModelParams& p);

/// P_N(mu grad phi), the forcing the velocity is projected from.
VectorField capillary_force(const SpectralField& phi, const SpectralField& mu,
                            int padding);

/// 1/4 int (phi^2 - 1)^2 + eps^2/2 int |grad phi|^2.
double ginzburg_landau_energy(const SpectralField& phi, const ModelParams& p);

/// A phi snapshot plus the simulation clock and a lazily filled evaluation
/// cache. The cache is tied to the phi it was computed from: replacing phi
/// drops it.
class State {
 public:
  State(SpectralField phi, double time = 0.0);

  const SpectralField& phi() const { return phi_; }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }
  void set_phi(SpectralField phi);

  const Domain& domain() const { return phi_.domain(); }
  double mean() const { return phi_.mean(); }

  /// Cached evaluation; computed on first use for the current phi.
  const Evaluation& evaluation(const ModelParams& p) const;
  bool has_cache() const { return cache_.has_value(); }

 private:
  SpectralField phi_;
  double time_;
  mutable std::optional<Evaluation> cache_;
  mutable ModelParams cache_params_;
};

}  // namespace chhs
