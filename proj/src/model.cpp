#include "chhs/model.hpp"

#include <cmath>
#include <string>

namespace chhs {

namespace {

bool same_params(const ModelParams& a, const ModelParams& b) {
  return a.epsilon == b.epsilon && a.gamma == b.gamma &&
         a.advection_enabled == b.advection_enabled &&
         a.dealias_padding == b.dealias_padding;
}

void require_cosine(const SpectralField& f, const char* what) {
  if (!f.is_cosine()) {
    throw StructuralError(std::string(what) + " requires cosine parity");
  }
}

SpectralField cubic_projection(const ScalarField& phi_grid) {
  ScalarField cube = phi_grid;
  for (double& x : cube.values()) x = x * x * x;
  if (!cube.all_finite()) {
    throw OverflowError("chemical_potential: phi^3 overflowed on the grid");
  }
  return forward_transform(cube);
}

// mu = P_N(phi^3) - phi - eps^2 lap phi
SpectralField mu_from(const SpectralField& phi, SpectralField cube,
                      const ModelParams& p) {
  SpectralField mu = std::move(cube);
  mu -= phi;
  const Domain& d = phi.domain();
  const double eps2 = p.epsilon * p.epsilon;
  auto c = mu.coeffs();
  phi.for_each_mode([&](int i, int j, int k, std::size_t n) {
    c[n] += eps2 * d.eigenvalue(i, j, k) * phi[n];
  });
  if (!mu.all_finite()) {
    throw OverflowError("chemical_potential: non-finite coefficients");
  }
  return mu;
}

std::vector<ScalarField> gradient_on_grid(const SpectralField& phi, int padding) {
  std::vector<ScalarField> out;
  for (auto& comp : gradient(phi).components) {
    out.push_back(inverse_transform(comp, padding));
  }
  return out;
}

VectorField force_from(const ScalarField& mu_grid,
                       const std::vector<ScalarField>& grad_grid) {
  VectorField f;
  for (std::size_t a = 0; a < grad_grid.size(); ++a) {
    ScalarField prod = grad_grid[a];
    auto out = prod.values();
    auto m = mu_grid.values();
    for (std::size_t n = 0; n < out.size(); ++n) out[n] *= m[n];
    f.components.push_back(forward_transform(prod, velocity_parity(static_cast<int>(a))));
  }
  return f;
}

SpectralField advection_projection(const VectorField& v,
                                   const std::vector<ScalarField>& grad_grid,
                                   int padding) {
  ScalarField adv(grad_grid.front().domain(), padding);
  auto out = adv.values();
  for (std::size_t a = 0; a < grad_grid.size(); ++a) {
    ScalarField va = inverse_transform(v.components[a], padding);
    auto g = grad_grid[a].values();
    auto vv = va.values();
    for (std::size_t n = 0; n < out.size(); ++n) out[n] += vv[n] * g[n];
  }
  return forward_transform(adv);
}

}  // namespace

ModelParams ModelParams::from_domain(const Domain& d) {
  ModelParams p;
  p.epsilon = d.epsilon;
  p.gamma = d.gamma;
  return p;
}

void ModelParams::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  if (dealias_padding != 1 && dealias_padding != 2) {
    throw std::invalid_argument("dealias padding must be 1 or 2");
  }
}

double double_well(double phi) {
  const double s = phi * phi - 1.0;
  return 0.25 * s * s;
}

double double_well_prime(double phi) { return phi * phi * phi - phi; }

double double_well_second(double phi) { return 3.0 * phi * phi - 1.0; }

Evaluation evaluate(const SpectralField& phi, const ModelParams& p) {
  require_cosine(phi, "evaluate");
  const int pad = p.dealias_padding;
  const Domain& d = phi.domain();
  const ScalarField phi_grid = inverse_transform(phi, pad);

  SpectralField nonlinear = cubic_projection(phi_grid);
  Evaluation ev{mu_from(phi, nonlinear, p), VectorField::zero(d), SpectralField(d),
                SpectralField(d), 0.0};

  // lap(P_N(phi^3) - phi): the eps^2 lap phi part of mu is the implicit term.
  nonlinear -= phi;
  ev.explicit_part = laplacian(nonlinear);

  if (p.advection_enabled && p.gamma > 0.0) {
    const auto grad_grid = gradient_on_grid(phi, pad);
    const ScalarField mu_grid = inverse_transform(ev.mu, pad);
    ev.velocity = helmholtz_leray_project(force_from(mu_grid, grad_grid));
    ev.velocity *= p.gamma;
    ev.explicit_part -= advection_projection(ev.velocity, grad_grid, pad);
  }

  ev.rhs = ev.explicit_part;
  const double eps2 = p.epsilon * p.epsilon;
  auto r = ev.rhs.coeffs();
  phi.for_each_mode([&](int i, int j, int k, std::size_t n) {
    const double lambda = d.eigenvalue(i, j, k);
    r[n] -= eps2 * lambda * lambda * phi[n];
  });
  ev.mass_residual = r[0];
  r[0] = 0.0;
  ev.explicit_part[0] = 0.0;
  if (!ev.rhs.all_finite()) throw OverflowError("rhs: non-finite coefficients");
  return ev;
}

SpectralField chemical_potential(const SpectralField& phi, const ModelParams& p) {
  require_cosine(phi, "chemical_potential");
  return mu_from(phi, cubic_projection(inverse_transform(phi, p.dealias_padding)), p);
}

VectorField capillary_force(const SpectralField& phi, const SpectralField& mu,
                            int padding) {
  require_cosine(phi, "capillary_force");
  require_cosine(mu, "capillary_force");
  return force_from(inverse_transform(mu, padding), gradient_on_grid(phi, padding));
}

VectorField velocity(const SpectralField& phi, const SpectralField& mu,
                     const ModelParams& p) {
  if (!p.advection_enabled || p.gamma == 0.0) return VectorField::zero(phi.domain());
  VectorField v = helmholtz_leray_project(capillary_force(phi, mu, p.dealias_padding));
  v *= p.gamma;
  return v;
}

SpectralField pressure(const SpectralField& phi, const SpectralField& mu,
                       const ModelParams& p) {
  // gamma f = gamma P_sigma f + gamma grad q with lap q = div f, so P = gamma q.
  const VectorField f = capillary_force(phi, mu, p.dealias_padding);
  SpectralField q = solve_poisson(divergence(f));
  q *= p.gamma;
  return q;
}

SpectralField rhs(const SpectralField& phi, const ModelParams& p) {
  return evaluate(phi, p).rhs;
}

double ginzburg_landau_energy(const SpectralField& phi, const ModelParams& p) {
  require_cosine(phi, "ginzburg_landau_energy");
  const ScalarField grid = inverse_transform(phi, p.dealias_padding);
  double bulk = 0.0;
  for (double x : grid.values()) bulk += double_well(x);
  bulk *= grid.cell_volume();

  const Domain& d = phi.domain();
  double grad = 0.0;
  phi.for_each_mode([&](int i, int j, int k, std::size_t n) {
    grad += d.eigenvalue(i, j, k) * phi[n] * phi[n];
  });
  return bulk + 0.5 * p.epsilon * p.epsilon * grad;
}

// --- State -----------------------------------------------------------------

State::State(SpectralField phi, double time) : phi_(std::move(phi)), time_(time) {
  require_cosine(phi_, "State");
}

void State::set_phi(SpectralField phi) {
  require_cosine(phi, "State");
  phi_ = std::move(phi);
  cache_.reset();
}

const Evaluation& State::evaluation(const ModelParams& p) const {
  if (!cache_ || !same_params(cache_params_, p)) {
    cache_ = evaluate(phi_, p);
    cache_params_ = p;
  }
  return *cache_;
}

}  // namespace chhs
