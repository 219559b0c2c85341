// Monitored quantities and checks of the model's long-time and smoothing
// behaviour on simulation output.
#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chhs/model.hpp"

namespace chhs {

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Onset of the spinodal region, where F''(phi) = 3 phi^2 - 1 changes sign.
inline constexpr double kSpinodalThreshold = 0.57735026918962576;  // sqrt(3)/3

struct DiagnosticsRecord {
  double time = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double grad_mu_sq = 0.0;
  double v_sq = 0.0;
  double h1_dist = 0.0;
  double h2_dist = 0.0;
  double h4_weighted = 0.0;
  /// NaN when the spectrum has too few resolved shells to fit.
  double gevrey_slope = 0.0;
  /// Step size that produced this state (0 for the initial state).
  double dt = 0.0;
};

DiagnosticsRecord record(const State& state, const ModelParams& p, double dt = 0.0);

/// phi - mean(phi), i.e. the field with its 0-mode removed.
SpectralField fluctuation(const SpectralField& phi);

struct DecayFit {
  double rate = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  std::size_t samples = 0;
};

/// Least-squares line through (t, log value) for samples with t inside the
/// closed window; rate = -slope. An empty window means "all samples".
DecayFit fit_exponential_decay(std::span<const double> times,
                               std::span<const double> values,
                               std::optional<std::pair<double, double>> window = {});

struct GevreyFit {
  double slope = 0.0;
  double r_squared = 0.0;
  std::size_t shells = 0;
};

inline constexpr double kGevreyCoefficientFloor = 1e-14;

/// Fits log(max |c| over an eigenvalue shell) against sqrt(1 + lambda) for
/// shells with lambda >= lambda_floor (the 0-mode is always excluded).
GevreyFit gevrey_fit(const SpectralField& phi, double lambda_floor = 0.0);

struct TheoremConditions {
  double mean = 0.0;
  double spinodal_threshold = kSpinodalThreshold;
  /// |mean| > sqrt(3)/3: constants are linearly stable (small-perturbation decay).
  bool outside_spinodal = false;
  double longest_edge = 0.0;
  double edge_limit = 0.0;  // epsilon * pi
  /// Every edge shorter than epsilon*pi (large-perturbation decay hypothesis).
  bool small_domain = false;
  /// The large-perturbation result is stated for rectangles only.
  bool large_perturbation_applicable = false;
  double poincare = 0.0;
  double epsilon_sq = 0.0;
  bool poincare_below_epsilon_sq = false;
  double initial_h2_dist_sq = 0.0;

  std::string to_text() const;
};

TheoremConditions check_theorem_conditions(const Domain& domain,
                                           const SpectralField& phi0);

/// Pointwise integrand G of the stored-energy functional:
/// int_0^d ((phi2 + s)^3 - phi2^3) ds = d^4/4 + phi2 d^3 + 3/2 phi2^2 d^2.
double stored_energy_density(double difference, double phi2);

/// 1/2 |grad d|^2 + 1/2 |d|^2 + int G(d), d = phi1 - phi2.
double stored_energy_distance(const SpectralField& phi1, const SpectralField& phi2,
                              int padding = 2);

/// The integrand C(|mu|_{H2}^2 + |v|_{H1}^2 + 1) with C = 1 of the
/// continuous-dependence Gronwall bound, evaluated on the reference state.
double gronwall_integrand(const State& reference, const ModelParams& p);

struct SmoothingSeries {
  std::vector<double> times;
  std::vector<double> weighted_h4;  // t |phi|_{H4}^2
  double max = 0.0;
  double time_of_max = 0.0;
};

/// Extracts t |phi(t)|_{H4}^2 over records with t > 0.
SmoothingSeries smoothing_monitor(std::span<const DiagnosticsRecord> records);

/// Relative disagreement |a - b| / max(|a|, |b|) of two smoothing maxima from
/// runs at different resolution.
double resolution_disagreement(const SmoothingSeries& coarse,
                               const SmoothingSeries& fine);

/// |v|_{H1} / |P_N(mu grad phi)|_{H1}; bounded by gamma in the truncated space.
double velocity_bound_ratio(const SpectralField& phi, const ModelParams& p);

}  // namespace chhs
