#include "chhs/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

namespace chhs {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit least_squares_line(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LineFit fit;
  if (sxx == 0.0) throw InsufficientDataError("fit abscissae are all equal");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  // A flat series is fitted exactly by a flat line.
  fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  return fit;
}

// Groups of mode indices sharing one eigenvalue, sorted by eigenvalue.
struct Shells {
  Domain domain;
  std::vector<double> lambda;
  std::vector<std::vector<std::size_t>> members;
};

Shells build_shells(const Domain& d) {
  Shells s{d, {}, {}};
  const std::vector<double> lam = eigenvalues(d);
  std::vector<std::size_t> order(lam.size());
  for (std::size_t n = 0; n < order.size(); ++n) order[n] = n;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lam[a] < lam[b]; });
  for (std::size_t n : order) {
    const double l = lam[n];
    if (!s.lambda.empty() &&
        std::abs(l - s.lambda.back()) <= 1e-10 * std::max(1.0, l)) {
      s.members.back().push_back(n);
    } else {
      s.lambda.push_back(l);
      s.members.push_back({n});
    }
  }
  return s;
}

std::shared_ptr<const Shells> shells_for(const Domain& d) {
  static std::mutex mutex;
  static std::vector<std::shared_ptr<const Shells>> cache;
  std::lock_guard lock(mutex);
  for (const auto& s : cache) {
    if (s->domain.same_space(d)) return s;
  }
  if (cache.size() >= 8) cache.erase(cache.begin());
  cache.push_back(std::make_shared<const Shells>(build_shells(d)));
  return cache.back();
}

}  // namespace

SpectralField fluctuation(const SpectralField& phi) {
  SpectralField out = phi;
  out[0] = 0.0;
  return out;
}

DiagnosticsRecord record(const State& state, const ModelParams& p, double dt) {
  const SpectralField& phi = state.phi();
  const Domain& d = phi.domain();
  const Evaluation& ev = state.evaluation(p);

  DiagnosticsRecord r;
  r.time = state.time();
  r.dt = dt;
  r.mass = phi.mean();
  r.energy = ginzburg_landau_energy(phi, p);
  double grad_mu = 0.0;
  ev.mu.for_each_mode([&](int i, int j, int k, std::size_t n) {
    grad_mu += d.eigenvalue(i, j, k) * ev.mu[n] * ev.mu[n];
  });
  r.grad_mu_sq = grad_mu;
  r.v_sq = norm_sq(ev.velocity);
  const SpectralField fluct = fluctuation(phi);
  r.h1_dist = sobolev_norm(fluct, 1.0);
  r.h2_dist = sobolev_norm(fluct, 2.0);
  const double h4 = sobolev_norm(phi, 4.0);
  r.h4_weighted = state.time() * h4 * h4;
  try {
    r.gevrey_slope = gevrey_fit(phi).slope;
  } catch (const InsufficientDataError&) {
    r.gevrey_slope = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

DecayFit fit_exponential_decay(std::span<const double> times,
                               std::span<const double> values,
                               std::optional<std::pair<double, double>> window) {
  if (times.size() != values.size()) {
    throw std::invalid_argument("fit_exponential_decay: length mismatch");
  }
  std::vector<double> t;
  std::vector<double> logv;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (window && (times[i] < window->first || times[i] > window->second)) continue;
    if (!(values[i] > 0.0)) {
      throw DomainError("fit_exponential_decay: nonpositive value at t=" +
                        std::to_string(times[i]));
    }
    t.push_back(times[i]);
    logv.push_back(std::log(values[i]));
  }
  if (t.size() < 10) {
    throw InsufficientDataError("fit_exponential_decay: need >= 10 samples, have " +
                                std::to_string(t.size()));
  }
  const LineFit line = least_squares_line(t, logv);
  DecayFit fit;
  fit.rate = -line.slope;
  fit.intercept = line.intercept;
  fit.r_squared = line.r_squared;
  fit.window = {t.front(), t.back()};
  fit.samples = t.size();
  return fit;
}

GevreyFit gevrey_fit(const SpectralField& phi, double lambda_floor) {
  if (!phi.is_cosine()) throw StructuralError("gevrey_fit requires cosine parity");
  const auto shell_ptr = shells_for(phi.domain());
  const Shells& shells = *shell_ptr;
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t s = 0; s < shells.lambda.size(); ++s) {
    const double lambda = shells.lambda[s];
    if (lambda == 0.0 || lambda < lambda_floor) continue;
    double peak = 0.0;
    for (std::size_t n : shells.members[s]) peak = std::max(peak, std::abs(phi[n]));
    if (peak <= kGevreyCoefficientFloor) continue;
    x.push_back(std::sqrt(1.0 + lambda));
    y.push_back(std::log(peak));
  }
  if (x.size() < 5) {
    throw InsufficientDataError("gevrey_fit: fewer than 5 resolved shells");
  }
  const LineFit line = least_squares_line(x, y);
  return GevreyFit{line.slope, line.r_squared, x.size()};
}

std::string TheoremConditions::to_text() const {
  std::ostringstream os;
  os.precision(10);
  auto flag = [](bool ok) { return ok ? "satisfied" : "violated"; };
  os << "mean phi:                      " << mean << "\n"
     << "spinodal threshold sqrt(3)/3:  " << spinodal_threshold << "\n"
     << "small-perturbation decay (|mean| > sqrt(3)/3): " << flag(outside_spinodal)
     << "\n"
     << "longest edge:                  " << longest_edge << "\n"
     << "edge limit epsilon*pi:         " << edge_limit << "\n"
     << "large-perturbation decay (2D, edges < epsilon*pi): "
     << flag(large_perturbation_applicable && small_domain) << "\n"
     << "poincare constant:             " << poincare << "\n"
     << "epsilon^2:                     " << epsilon_sq << "\n"
     << "poincare < epsilon^2:          " << flag(poincare_below_epsilon_sq) << "\n"
     << "initial |phi0 - mean|_H2^2:    " << initial_h2_dist_sq << "\n";
  return os.str();
}

TheoremConditions check_theorem_conditions(const Domain& domain,
                                           const SpectralField& phi0) {
  TheoremConditions c;
  c.mean = phi0.mean();
  c.outside_spinodal = std::abs(c.mean) > kSpinodalThreshold;
  for (int a = 0; a < domain.dim; ++a) {
    c.longest_edge = std::max(c.longest_edge, domain.extents[a]);
  }
  c.edge_limit = domain.epsilon * std::numbers::pi;
  c.small_domain = c.longest_edge < c.edge_limit;
  c.large_perturbation_applicable = domain.dim == 2;
  c.poincare = poincare_constant(domain);
  c.epsilon_sq = domain.epsilon * domain.epsilon;
  c.poincare_below_epsilon_sq = c.poincare < c.epsilon_sq;
  const double h2 = sobolev_norm(fluctuation(phi0), 2.0);
  c.initial_h2_dist_sq = h2 * h2;
  return c;
}

double stored_energy_density(double difference, double phi2) {
  const double d2 = difference * difference;
  return 0.25 * d2 * d2 + phi2 * d2 * difference + 1.5 * phi2 * phi2 * d2;
}

double stored_energy_distance(const SpectralField& phi1, const SpectralField& phi2,
                              int padding) {
  if (!phi1.domain().same_space(phi2.domain())) {
    throw StructuralError("stored_energy_distance: fields on different domains");
  }
  const SpectralField diff = phi1 - phi2;
  const Domain& d = diff.domain();
  double quad = 0.0;
  diff.for_each_mode([&](int i, int j, int k, std::size_t n) {
    quad += (1.0 + d.eigenvalue(i, j, k)) * diff[n] * diff[n];
  });
  const ScalarField dg = inverse_transform(diff, padding);
  const ScalarField pg = inverse_transform(phi2, padding);
  double g = 0.0;
  for (std::size_t n = 0; n < dg.size(); ++n) g += stored_energy_density(dg[n], pg[n]);
  return 0.5 * quad + g * dg.cell_volume();
}

double gronwall_integrand(const State& reference, const ModelParams& p) {
  const Evaluation& ev = reference.evaluation(p);
  const double mu_h2 = sobolev_norm(ev.mu, 2.0);
  const double v_h1 = sobolev_norm(ev.velocity, 1.0);
  return mu_h2 * mu_h2 + v_h1 * v_h1 + 1.0;
}

SmoothingSeries smoothing_monitor(std::span<const DiagnosticsRecord> records) {
  SmoothingSeries s;
  for (const auto& r : records) {
    if (!(r.time > 0.0)) continue;
    s.times.push_back(r.time);
    s.weighted_h4.push_back(r.h4_weighted);
    if (r.h4_weighted > s.max) {
      s.max = r.h4_weighted;
      s.time_of_max = r.time;
    }
  }
  return s;
}

double resolution_disagreement(const SmoothingSeries& coarse,
                               const SmoothingSeries& fine) {
  const double scale = std::max(std::abs(coarse.max), std::abs(fine.max));
  return scale == 0.0 ? 0.0 : std::abs(coarse.max - fine.max) / scale;
}

double velocity_bound_ratio(const SpectralField& phi, const ModelParams& p) {
  const SpectralField mu = chemical_potential(phi, p);
  const VectorField force = capillary_force(phi, mu, p.dealias_padding);
  const double denom = sobolev_norm(force, 1.0);
  if (denom == 0.0) return 0.0;
  return sobolev_norm(velocity(phi, mu, p), 1.0) / denom;
}

}  // namespace chhs
