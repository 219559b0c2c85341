#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chhs::oracle {

namespace {

constexpr double kPi = std::numbers::pi;

int axis_index(int axis, int i, int j, int k) {
  return axis == 0 ? i : (axis == 1 ? j : k);
}

double eigenvalue(const Domain& d, int i, int j, int k) {
  double s = 0.0;
  const int idx[3] = {i, j, k};
  for (int a = 0; a < d.dim; ++a) {
    const double kk = idx[a] * kPi / d.extents[a];
    s += kk * kk;
  }
  return s;
}

}  // namespace

double basis_1d(Parity parity, int index, double length, double x) {
  const double arg = index * kPi * x / length;
  if (parity == Parity::kCosine) {
    return index == 0 ? 1.0 / std::sqrt(length)
                      : std::sqrt(2.0 / length) * std::cos(arg);
  }
  return index == 0 ? 0.0 : std::sqrt(2.0 / length) * std::sin(arg);
}

double basis_1d_derivative(Parity parity, int index, double length, double x) {
  const double kk = index * kPi / length;
  const double arg = kk * x;
  if (parity == Parity::kCosine) {
    return index == 0 ? 0.0 : -std::sqrt(2.0 / length) * kk * std::sin(arg);
  }
  return index == 0 ? 0.0 : std::sqrt(2.0 / length) * kk * std::cos(arg);
}

QuadGrid::QuadGrid(const Domain& d, int pts) : domain(d), points(pts), weight(1.0) {
  for (int a = 0; a < 3; ++a) {
    if (a < d.dim) {
      for (int p = 0; p < pts; ++p) nodes[a].push_back((p + 0.5) * d.extents[a] / pts);
      weight *= d.extents[a] / pts;
    } else {
      nodes[a].push_back(0.0);
    }
  }
}

std::size_t QuadGrid::size() const {
  return nodes[0].size() * nodes[1].size() * nodes[2].size();
}

std::vector<double> QuadGrid::sample(
    const std::function<double(double, double, double)>& f) const {
  std::vector<double> out;
  out.reserve(size());
  for (double z : nodes[2])
    for (double y : nodes[1])
      for (double x : nodes[0]) out.push_back(f(x, y, z));
  return out;
}

double synthesize(const SpectralField& c, double x, double y, double z) {
  const Domain& d = c.domain();
  const double pos[3] = {x, y, z};
  double sum = 0.0;
  c.for_each_mode([&](int i, int j, int k, std::size_t n) {
    double v = c[n];
    for (int a = 0; a < d.dim; ++a) {
      v *= basis_1d(c.parity()[a], axis_index(a, i, j, k), d.extents[a], pos[a]);
    }
    sum += v;
  });
  return sum;
}

double synthesize_derivative(const SpectralField& c, int axis, double x, double y,
                             double z) {
  const Domain& d = c.domain();
  const double pos[3] = {x, y, z};
  double sum = 0.0;
  c.for_each_mode([&](int i, int j, int k, std::size_t n) {
    double v = c[n];
    for (int a = 0; a < d.dim; ++a) {
      const int idx = axis_index(a, i, j, k);
      v *= a == axis ? basis_1d_derivative(c.parity()[a], idx, d.extents[a], pos[a])
                     : basis_1d(c.parity()[a], idx, d.extents[a], pos[a]);
    }
    sum += v;
  });
  return sum;
}

std::vector<double> synthesize_on(const SpectralField& c, const QuadGrid& g) {
  return g.sample([&](double x, double y, double z) { return synthesize(c, x, y, z); });
}

std::vector<double> synthesize_derivative_on(const SpectralField& c, int axis,
                                             const QuadGrid& g) {
  return g.sample([&](double x, double y, double z) {
    return synthesize_derivative(c, axis, x, y, z);
  });
}

std::vector<double> synthesize_second_derivative_on(const SpectralField& c, int a, int b,
                                                    const QuadGrid& g) {
  if (!c.is_cosine()) throw std::invalid_argument("second derivative: cosine parity only");
  const Domain& d = c.domain();
  int order[3] = {0, 0, 0};
  ++order[a];
  ++order[b];
  auto factor = [&](int axis, int idx, double x) {
    const double kk = idx * kPi / d.extents[axis];
    const double arg = kk * x;
    const double amp = idx == 0 ? 1.0 / std::sqrt(d.extents[axis]) : std::sqrt(2.0 / d.extents[axis]);
    switch (order[axis]) {
      case 0: return amp * std::cos(arg);
      case 1: return -amp * kk * std::sin(arg);
      default: return -amp * kk * kk * std::cos(arg);
    }
  };
  return g.sample([&](double x, double y, double z) {
    const double pos[3] = {x, y, z};
    double sum = 0.0;
    c.for_each_mode([&](int i, int j, int k, std::size_t n) {
      double v = c[n];
      for (int ax = 0; ax < d.dim; ++ax) v *= factor(ax, axis_index(ax, i, j, k), pos[ax]);
      sum += v;
    });
    return sum;
  });
}

SpectralField project(const std::vector<double>& values, const QuadGrid& g,
                      const Parities& parity) {
  const Domain& d = g.domain;
  const std::size_t mx = g.nodes[0].size();
  const std::size_t my = g.nodes[1].size();
  const std::size_t mz = g.nodes[2].size();
  std::vector<double> coeffs(d.size(), 0.0);
  std::size_t n = 0;
  for (int k = 0; k < d.modes[2]; ++k)
    for (int j = 0; j < d.modes[1]; ++j)
      for (int i = 0; i < d.modes[0]; ++i, ++n) {
        double sum = 0.0;
        std::size_t q = 0;
        for (std::size_t r = 0; r < mz; ++r) {
          const double bz = d.dim == 3
                                ? basis_1d(parity[2], k, d.extents[2], g.nodes[2][r])
                                : 1.0;
          for (std::size_t t = 0; t < my; ++t) {
            const double by = basis_1d(parity[1], j, d.extents[1], g.nodes[1][t]);
            for (std::size_t p = 0; p < mx; ++p, ++q) {
              sum += values[q] * bz * by *
                     basis_1d(parity[0], i, d.extents[0], g.nodes[0][p]);
            }
          }
        }
        coeffs[n] = sum * g.weight;
      }
  return SpectralField(d, std::move(coeffs), parity);
}

double integrate(const std::vector<double>& values, const QuadGrid& g) {
  double s = 0.0;
  for (double v : values) s += v;
  return s * g.weight;
}

DivergenceFreeBasis::DivergenceFreeBasis(const Domain& d, int points) : grid_(d, points) {
  const std::size_t m = grid_.size();
  const double lx = d.extents[0];
  const double ly = d.extents[1];
  const double lz = d.extents[2];
  auto c = [](int i, double len, double x) { return std::cos(i * kPi * x / len); };
  auto s = [](int i, double len, double x) { return std::sin(i * kPi * x / len); };

  std::vector<std::vector<double>> raw;
  auto add = [&](const std::function<std::array<double, 3>(double, double, double)>& f) {
    std::vector<double> vec(static_cast<std::size_t>(d.dim) * m);
    std::size_t q = 0;
    for (double z : grid_.nodes[2])
      for (double y : grid_.nodes[1])
        for (double x : grid_.nodes[0]) {
          const auto val = f(x, y, z);
          for (int a = 0; a < d.dim; ++a) vec[a * m + q] = val[a];
          ++q;
        }
    raw.push_back(std::move(vec));
  };

  const int nz = d.dim == 3 ? d.modes[2] : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < d.modes[1]; ++j)
      for (int i = 0; i < d.modes[0]; ++i) {
        // w family: swirl in the x-y plane.
        if (i >= 1 && j >= 1) {
          const double div = (j / ly) * (i * kPi / lx) - (i / lx) * (j * kPi / ly);
          max_raw_divergence_ = std::max(max_raw_divergence_, std::abs(div));
          add([=](double x, double y, double z) {
            const double cz = d.dim == 3 ? c(k, lz, z) : 1.0;
            return std::array<double, 3>{(j / ly) * s(i, lx, x) * c(j, ly, y) * cz,
                                         -(i / lx) * c(i, lx, x) * s(j, ly, y) * cz,
                                         0.0};
          });
        }
        // v family (3D only). The z-scaling k/h on the first two components
        // is what makes these divergence-free for a general box height.
        if (d.dim == 3 && k >= 1 && (i >= 1 || j >= 1)) {
          const double a = (i / lx) * (k / lz);
          const double b = (j / ly) * (k / lz);
          const double e = -((i * i) / (lx * lx) + (j * j) / (ly * ly));
          const double div = a * (i * kPi / lx) + b * (j * kPi / ly) + e * (k * kPi / lz);
          max_raw_divergence_ = std::max(max_raw_divergence_, std::abs(div));
          add([=](double x, double y, double z) {
            return std::array<double, 3>{a * s(i, lx, x) * c(j, ly, y) * c(k, lz, z),
                                         b * c(i, lx, x) * s(j, ly, y) * c(k, lz, z),
                                         e * c(i, lx, x) * c(j, ly, y) * s(k, lz, z)};
          });
        }
      }

  // Modified Gram-Schmidt in the quadrature inner product.
  for (auto& vec : raw) {
    for (const auto& b : basis_) {
      double proj = 0.0;
      for (std::size_t q = 0; q < vec.size(); ++q) proj += vec[q] * b[q];
      proj *= grid_.weight;
      for (std::size_t q = 0; q < vec.size(); ++q) vec[q] -= proj * b[q];
    }
    double nrm = 0.0;
    for (double x : vec) nrm += x * x;
    nrm = std::sqrt(nrm * grid_.weight);
    if (nrm < 1e-10) continue;
    for (double& x : vec) x /= nrm;
    basis_.push_back(std::move(vec));
  }
}

std::vector<std::vector<double>> DivergenceFreeBasis::project(
    const std::vector<std::vector<double>>& u) const {
  const std::size_t m = grid_.size();
  const int dim = grid_.domain.dim;
  std::vector<std::vector<double>> out(dim, std::vector<double>(m, 0.0));
  for (const auto& b : basis_) {
    double coef = 0.0;
    for (int a = 0; a < dim; ++a)
      for (std::size_t q = 0; q < m; ++q) coef += u[a][q] * b[a * m + q];
    coef *= grid_.weight;
    for (int a = 0; a < dim; ++a)
      for (std::size_t q = 0; q < m; ++q) out[a][q] += coef * b[a * m + q];
  }
  return out;
}

std::vector<std::vector<double>> synthesize_vector_on(const VectorField& v,
                                                      const QuadGrid& g) {
  std::vector<std::vector<double>> out;
  for (const auto& comp : v.components) out.push_back(synthesize_on(comp, g));
  return out;
}

SpectralField brute_force_rhs(const SpectralField& phi, const ModelParams& p, int points) {
  const Domain& d = phi.domain();
  const QuadGrid g(d, points);
  const std::size_t m = g.size();

  const std::vector<double> phi_g = synthesize_on(phi, g);
  std::vector<double> cube(m);
  for (std::size_t q = 0; q < m; ++q) cube[q] = phi_g[q] * phi_g[q] * phi_g[q];
  SpectralField mu = project(cube, g, kCosineParity);
  const double eps2 = p.epsilon * p.epsilon;
  mu.for_each_mode([&](int i, int j, int k, std::size_t n) {
    mu[n] += -phi[n] + eps2 * eigenvalue(d, i, j, k) * phi[n];
  });

  SpectralField out(d);
  out.for_each_mode([&](int i, int j, int k, std::size_t n) {
    out[n] = -eigenvalue(d, i, j, k) * mu[n];
  });

  if (p.advection_enabled && p.gamma > 0.0) {
    const std::vector<double> mu_g = synthesize_on(mu, g);
    std::vector<std::vector<double>> grad(d.dim);
    std::vector<std::vector<double>> force(d.dim, std::vector<double>(m));
    for (int a = 0; a < d.dim; ++a) {
      grad[a] = synthesize_derivative_on(phi, a, g);
      for (std::size_t q = 0; q < m; ++q) force[a][q] = mu_g[q] * grad[a][q];
    }
    const DivergenceFreeBasis basis(d, points);
    const auto vel = basis.project(force);
    std::vector<double> adv(m, 0.0);
    for (int a = 0; a < d.dim; ++a)
      for (std::size_t q = 0; q < m; ++q) adv[q] += p.gamma * vel[a][q] * grad[a][q];
    out -= project(adv, g, kCosineParity);
  }
  out[0] = 0.0;
  return out;
}

SpectralField random_field(const Domain& d, std::mt19937_64& rng, double scale,
                           double decay, const Parities& parity) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> coeffs(d.size());
  std::size_t n = 0;
  for (int k = 0; k < d.modes[2]; ++k)
    for (int j = 0; j < d.modes[1]; ++j)
      for (int i = 0; i < d.modes[0]; ++i, ++n) {
        const double r = u(rng);
        bool dead = false;
        const int idx[3] = {i, j, k};
        for (int a = 0; a < d.dim; ++a) {
          if (parity[a] == Parity::kSine && idx[a] == 0) dead = true;
        }
        coeffs[n] = dead ? 0.0
                         : scale * r * std::pow(1.0 + eigenvalue(d, i, j, k), -decay);
      }
  return SpectralField(d, std::move(coeffs), parity);
}

VectorField random_vector(const Domain& d, std::mt19937_64& rng, double scale,
                          double decay) {
  VectorField v;
  for (int a = 0; a < d.dim; ++a) {
    v.components.push_back(random_field(d, rng, scale, decay, velocity_parity(a)));
  }
  return v;
}

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  if (a.size() != b.size()) throw std::logic_error("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

double max_abs(const VectorField& v) {
  double m = 0.0;
  for (const auto& c : v.components) m = std::max(m, c.max_abs());
  return m;
}

}  // namespace chhs::oracle
