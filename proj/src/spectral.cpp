#include "chhs/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>
#include <tuple>

namespace chhs {

namespace {

constexpr double kPi = std::numbers::pi;

int active_axes(const Domain& d) { return d.dim; }

// FFTW's planner is not thread safe; executing an existing plan on new
// arrays is. Plans are created once per (grid, kinds, threads) and reused.
class PlanCache {
 public:
  using Key = std::tuple<std::array<int, 3>, std::array<int, 3>, int, int>;

  fftw_plan get(int rank, const std::array<int, 3>& n,
                const std::array<fftw_r2r_kind, 3>& kinds) {
    std::lock_guard lock(mutex_);
    Key key{n, {kinds[0], kinds[1], kinds[2]}, rank, threads_};
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    init_threads();
    fftw_plan_with_nthreads(threads_);
    std::size_t total = 1;
    for (int a = 0; a < rank; ++a) total *= static_cast<std::size_t>(n[a]);
    // FFTW_ESTIMATE never touches the arrays during planning.
    double* in = fftw_alloc_real(total);
    double* out = fftw_alloc_real(total);
    fftw_plan plan = fftw_plan_r2r(rank, n.data(), in, out, kinds.data(),
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    if (plan == nullptr) throw std::runtime_error("FFTW plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

  void set_threads(int threads) {
    std::lock_guard lock(mutex_);
    if (threads < 1) {
      threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }
    threads_ = threads;
  }

  int threads() {
    std::lock_guard lock(mutex_);
    return threads_;
  }

 private:
  void init_threads() {
    if (!threads_ready_) {
      fftw_init_threads();
      threads_ready_ = true;
    }
  }

  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
  int threads_ = 1;
  bool threads_ready_ = false;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

// Per-axis bookkeeping shared by forward and inverse transforms.
struct AxisMap {
  int grid = 1;   // nodes on this axis (M)
  int modes = 1;  // retained modes (N)
  Parity parity = Parity::kCosine;
  bool active = false;
  std::vector<int> slot;         // buffer index for each mode, -1 if none
  std::vector<double> forward;   // buffer value -> coefficient
  std::vector<double> inverse;   // coefficient -> buffer value
};

AxisMap make_axis(const Domain& d, int axis, int padding, Parity parity) {
  AxisMap a;
  a.active = axis < active_axes(d);
  a.parity = parity;
  a.modes = d.modes[axis];
  a.grid = a.active ? padding * d.modes[axis] : 1;
  a.slot.assign(a.modes, -1);
  a.forward.assign(a.modes, 0.0);
  a.inverse.assign(a.modes, 0.0);
  if (!a.active) {
    a.slot[0] = 0;
    a.forward[0] = 1.0;
    a.inverse[0] = 1.0;
    return a;
  }
  const double len = d.extents[axis];
  const double m = a.grid;
  for (int i = 0; i < a.modes; ++i) {
    if (parity == Parity::kCosine) {
      a.slot[i] = i;
      a.forward[i] = i == 0 ? std::sqrt(len) / (2.0 * m)
                            : std::sqrt(len) / (std::numbers::sqrt2 * m);
      a.inverse[i] = i == 0 ? 1.0 / std::sqrt(len) : 1.0 / std::sqrt(2.0 * len);
    } else if (i > 0) {
      // RODFT10 output k holds sin((k+1) pi x / L).
      a.slot[i] = i - 1;
      a.forward[i] = std::sqrt(len) / (std::numbers::sqrt2 * m);
      a.inverse[i] = 1.0 / std::sqrt(2.0 * len);
    }
  }
  return a;
}

fftw_plan plan_for(const std::array<AxisMap, 3>& axes, int rank, bool forward) {
  // FFTW wants the slowest axis first.
  std::array<int, 3> n{1, 1, 1};
  std::array<fftw_r2r_kind, 3> kinds{FFTW_REDFT10, FFTW_REDFT10, FFTW_REDFT10};
  for (int r = 0; r < rank; ++r) {
    const AxisMap& a = axes[rank - 1 - r];
    n[r] = a.grid;
    if (a.parity == Parity::kCosine) {
      kinds[r] = forward ? FFTW_REDFT10 : FFTW_REDFT01;
    } else {
      kinds[r] = forward ? FFTW_RODFT10 : FFTW_RODFT01;
    }
  }
  return plan_cache().get(rank, n, kinds);
}

void require_same_space(const Domain& a, const Domain& b, const char* what) {
  if (!a.same_space(b)) {
    throw StructuralError(std::string(what) + ": fields live on different domains");
  }
}

}  // namespace

// --- parity ----------------------------------------------------------------

Parities velocity_parity(int axis) {
  Parities p = kCosineParity;
  p.at(static_cast<std::size_t>(axis)) = Parity::kSine;
  return p;
}

std::string parity_string(const Parities& p, int dim) {
  std::string s;
  for (int a = 0; a < dim; ++a) s += p[a] == Parity::kCosine ? 'c' : 's';
  return s;
}

Parities parse_parity(const std::string& s) {
  Parities p = kCosineParity;
  if (s.size() > 3) throw std::invalid_argument("parity string too long: " + s);
  for (std::size_t a = 0; a < s.size(); ++a) {
    if (s[a] == 'c') {
      p[a] = Parity::kCosine;
    } else if (s[a] == 's') {
      p[a] = Parity::kSine;
    } else {
      throw std::invalid_argument("bad parity character in '" + s + "'");
    }
  }
  return p;
}

// --- Domain ----------------------------------------------------------------

Domain Domain::square(double length, int n, double epsilon, double gamma) {
  return rect(length, length, n, n, epsilon, gamma);
}

Domain Domain::rect(double lx, double ly, int nx, int ny, double epsilon,
                    double gamma) {
  Domain d;
  d.dim = 2;
  d.extents = {lx, ly, 1.0};
  d.modes = {nx, ny, 1};
  d.epsilon = epsilon;
  d.gamma = gamma;
  d.validate();
  return d;
}

Domain Domain::box(double lx, double ly, double lz, int nx, int ny, int nz,
                   double epsilon, double gamma) {
  Domain d;
  d.dim = 3;
  d.extents = {lx, ly, lz};
  d.modes = {nx, ny, nz};
  d.epsilon = epsilon;
  d.gamma = gamma;
  d.validate();
  return d;
}

void Domain::validate() const {
  if (dim != 2 && dim != 3) throw std::invalid_argument("dim must be 2 or 3");
  for (int a = 0; a < dim; ++a) {
    if (!(extents[a] > 0.0) || !std::isfinite(extents[a])) {
      throw std::invalid_argument("domain extents must be positive");
    }
    if (modes[a] < 2) throw std::invalid_argument("mode counts must be >= 2");
  }
  if (dim == 2 && modes[2] != 1) {
    throw std::invalid_argument("2D domains must have nz = 1");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
}

std::size_t Domain::size() const {
  return static_cast<std::size_t>(modes[0]) * static_cast<std::size_t>(modes[1]) *
         static_cast<std::size_t>(modes[2]);
}

double Domain::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= extents[a];
  return v;
}

double Domain::wavenumber(int axis, int index) const {
  if (axis >= dim) return 0.0;
  return index * kPi / extents[axis];
}

double Domain::eigenvalue(int i, int j, int k) const {
  const double kx = wavenumber(0, i);
  const double ky = wavenumber(1, j);
  const double kz = wavenumber(2, k);
  return kx * kx + ky * ky + kz * kz;
}

bool Domain::same_space(const Domain& other) const {
  if (dim != other.dim || modes != other.modes) return false;
  for (int a = 0; a < dim; ++a) {
    if (extents[a] != other.extents[a]) return false;
  }
  return true;
}

std::vector<double> eigenvalues(const Domain& d) {
  std::vector<double> out(d.size());
  std::size_t n = 0;
  for (int k = 0; k < d.modes[2]; ++k)
    for (int j = 0; j < d.modes[1]; ++j)
      for (int i = 0; i < d.modes[0]; ++i) out[n++] = d.eigenvalue(i, j, k);
  return out;
}

// --- ScalarField -----------------------------------------------------------

ScalarField::ScalarField(const Domain& domain, int padding)
    : domain_(domain), padding_(padding) {
  if (padding < 1) throw std::invalid_argument("padding must be >= 1");
  const auto g = grid();
  values_.assign(static_cast<std::size_t>(g[0]) * g[1] * g[2], 0.0);
}

ScalarField::ScalarField(const Domain& domain, std::vector<double> values,
                         int padding)
    : domain_(domain), padding_(padding), values_(std::move(values)) {
  if (padding < 1) throw std::invalid_argument("padding must be >= 1");
  const auto g = grid();
  if (values_.size() != static_cast<std::size_t>(g[0]) * g[1] * g[2]) {
    throw StructuralError("grid value count does not match the domain");
  }
}

ScalarField ScalarField::sample(
    const Domain& domain, const std::function<double(double, double, double)>& f,
    int padding) {
  ScalarField out(domain, padding);
  const auto g = out.grid();
  std::size_t n = 0;
  for (int r = 0; r < g[2]; ++r)
    for (int q = 0; q < g[1]; ++q)
      for (int p = 0; p < g[0]; ++p)
        out.values_[n++] = f(out.node(0, p), out.node(1, q), out.node(2, r));
  return out;
}

std::array<int, 3> ScalarField::grid() const {
  std::array<int, 3> g{1, 1, 1};
  for (int a = 0; a < domain_.dim; ++a) g[a] = padding_ * domain_.modes[a];
  return g;
}

double ScalarField::node(int axis, int p) const {
  if (axis >= domain_.dim) return 0.0;
  const double m = padding_ * domain_.modes[axis];
  return (p + 0.5) * domain_.extents[axis] / m;
}

double ScalarField::cell_volume() const {
  const auto g = grid();
  double v = 1.0;
  for (int a = 0; a < domain_.dim; ++a) v *= domain_.extents[a] / g[a];
  return v;
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double x) { return std::isfinite(x); });
}

// --- SpectralField ---------------------------------------------------------

SpectralField::SpectralField(const Domain& domain, const Parities& parity)
    : domain_(domain), parity_(parity), coeffs_(domain.size(), 0.0) {}

SpectralField::SpectralField(const Domain& domain, std::vector<double> coeffs,
                             const Parities& parity)
    : domain_(domain), parity_(parity), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != domain_.size()) {
    throw StructuralError("coefficient count does not match the domain");
  }
  for (int a = 0; a < domain_.dim; ++a) {
    if (parity_[a] != Parity::kSine) continue;
    bool clean = true;
    for_each_mode([&](int i, int j, int k, std::size_t n) {
      const int idx = a == 0 ? i : (a == 1 ? j : k);
      if (idx == 0 && coeffs_[n] != 0.0) clean = false;
    });
    if (!clean) {
      throw StructuralError("sine-parity axis has a nonzero slot-0 coefficient");
    }
  }
}

bool SpectralField::is_cosine() const {
  for (int a = 0; a < domain_.dim; ++a) {
    if (parity_[a] != Parity::kCosine) return false;
  }
  return true;
}

double SpectralField::mean() const {
  if (!is_cosine()) throw StructuralError("mean requires cosine parity");
  return coeffs_[0] / std::sqrt(domain_.volume());
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (double x : coeffs_) m = std::max(m, std::abs(x));
  return m;
}

bool SpectralField::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](double x) { return std::isfinite(x); });
}

void SpectralField::check_compatible(const SpectralField& other) const {
  require_same_space(domain_, other.domain_, "spectral arithmetic");
  for (int a = 0; a < domain_.dim; ++a) {
    if (parity_[a] != other.parity_[a]) {
      throw StructuralError("spectral arithmetic: parity mismatch");
    }
  }
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  return axpy(1.0, other);
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  return axpy(-1.0, other);
}

SpectralField& SpectralField::operator*=(double s) {
  for (double& x : coeffs_) x *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& other) {
  check_compatible(other);
  for (std::size_t n = 0; n < coeffs_.size(); ++n) coeffs_[n] += s * other.coeffs_[n];
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

double dot(const SpectralField& a, const SpectralField& b) {
  require_same_space(a.domain(), b.domain(), "dot");
  double sum = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) sum += a[n] * b[n];
  return sum;
}

double norm_sq(const SpectralField& a) { return dot(a, a); }

// --- VectorField -----------------------------------------------------------

VectorField VectorField::zero(const Domain& domain) {
  VectorField v;
  for (int a = 0; a < domain.dim; ++a) {
    v.components.emplace_back(domain, velocity_parity(a));
  }
  return v;
}

void VectorField::check_velocity_layout() const {
  if (components.empty()) throw StructuralError("vector field has no components");
  const Domain& d = components.front().domain();
  if (dim() != d.dim) {
    throw StructuralError("vector field component count differs from domain dim");
  }
  for (int a = 0; a < d.dim; ++a) {
    require_same_space(d, components[a].domain(), "vector field");
    const Parities expected = velocity_parity(a);
    for (int b = 0; b < d.dim; ++b) {
      if (components[a].parity()[b] != expected[b]) {
        throw StructuralError("vector component " + std::to_string(a) +
                              " does not have velocity parity");
      }
    }
  }
}

VectorField& VectorField::operator+=(const VectorField& other) {
  for (int a = 0; a < dim(); ++a) components[a] += other.components[a];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& other) {
  for (int a = 0; a < dim(); ++a) components[a] -= other.components[a];
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  for (auto& c : components) c *= s;
  return *this;
}

double dot(const VectorField& a, const VectorField& b) {
  if (a.dim() != b.dim()) throw StructuralError("dot: vector dims differ");
  double sum = 0.0;
  for (int c = 0; c < a.dim(); ++c) sum += dot(a.components[c], b.components[c]);
  return sum;
}

double norm_sq(const VectorField& a) { return dot(a, a); }

// --- transforms ------------------------------------------------------------

void set_transform_threads(int threads) { plan_cache().set_threads(threads); }
int transform_threads() { return plan_cache().threads(); }

SpectralField forward_transform(const ScalarField& f, const Parities& parity) {
  const Domain& d = f.domain();
  const int rank = d.dim;
  std::array<AxisMap, 3> axes;
  for (int a = 0; a < 3; ++a) axes[a] = make_axis(d, a, f.padding(), parity[a]);

  std::vector<double> buffer(f.size());
  fftw_execute_r2r(plan_for(axes, rank, true), const_cast<double*>(f.values().data()),
                   buffer.data());

  SpectralField out(d, parity);
  const std::size_t gx = static_cast<std::size_t>(axes[0].grid);
  const std::size_t gy = static_cast<std::size_t>(axes[1].grid);
  auto coeffs = out.coeffs();
  out.for_each_mode([&](int i, int j, int k, std::size_t n) {
    const int si = axes[0].slot[i];
    const int sj = axes[1].slot[j];
    const int sk = axes[2].slot[k];
    if (si < 0 || sj < 0 || sk < 0) return;
    const std::size_t src = static_cast<std::size_t>(si) +
                            gx * (static_cast<std::size_t>(sj) + gy * static_cast<std::size_t>(sk));
    coeffs[n] = axes[0].forward[i] * axes[1].forward[j] * axes[2].forward[k] * buffer[src];
  });
  return out;
}

ScalarField inverse_transform(const SpectralField& c, int padding) {
  const Domain& d = c.domain();
  const int rank = d.dim;
  std::array<AxisMap, 3> axes;
  for (int a = 0; a < 3; ++a) axes[a] = make_axis(d, a, padding, c.parity()[a]);

  ScalarField out(d, padding);
  std::vector<double> buffer(out.size(), 0.0);
  const std::size_t gx = static_cast<std::size_t>(axes[0].grid);
  const std::size_t gy = static_cast<std::size_t>(axes[1].grid);
  c.for_each_mode([&](int i, int j, int k, std::size_t n) {
    const int si = axes[0].slot[i];
    const int sj = axes[1].slot[j];
    const int sk = axes[2].slot[k];
    if (si < 0 || sj < 0 || sk < 0) return;
    const std::size_t dst = static_cast<std::size_t>(si) +
                            gx * (static_cast<std::size_t>(sj) + gy * static_cast<std::size_t>(sk));
    buffer[dst] = axes[0].inverse[i] * axes[1].inverse[j] * axes[2].inverse[k] * c[n];
  });
  fftw_execute_r2r(plan_for(axes, rank, false), buffer.data(), out.values().data());
  return out;
}

// --- operators -------------------------------------------------------------

SpectralField laplacian(const SpectralField& c) {
  SpectralField out = c;
  const Domain& d = c.domain();
  auto coeffs = out.coeffs();
  c.for_each_mode([&](int i, int j, int k, std::size_t n) {
    coeffs[n] *= -d.eigenvalue(i, j, k);
  });
  return out;
}

VectorField gradient(const SpectralField& c) {
  if (!c.is_cosine()) throw StructuralError("gradient requires cosine parity");
  const Domain& d = c.domain();
  VectorField out = VectorField::zero(d);
  for (int a = 0; a < d.dim; ++a) {
    auto dst = out.components[a].coeffs();
    c.for_each_mode([&](int i, int j, int k, std::size_t n) {
      const int idx = a == 0 ? i : (a == 1 ? j : k);
      // d/dx cos(kx) = -k sin(kx); both families share the sqrt(2/L) factor.
      dst[n] = idx == 0 ? 0.0 : -d.wavenumber(a, idx) * c[n];
    });
  }
  return out;
}

SpectralField divergence(const VectorField& v) {
  v.check_velocity_layout();
  const Domain& d = v.domain();
  SpectralField out(d);
  auto dst = out.coeffs();
  for (int a = 0; a < d.dim; ++a) {
    const SpectralField& comp = v.components[a];
    comp.for_each_mode([&](int i, int j, int k, std::size_t n) {
      const int idx = a == 0 ? i : (a == 1 ? j : k);
      dst[n] += d.wavenumber(a, idx) * comp[n];
    });
  }
  return out;
}

SpectralField solve_poisson(const SpectralField& f) {
  if (!f.is_cosine()) throw StructuralError("solve_poisson requires cosine parity");
  const Domain& d = f.domain();
  SpectralField q(d);
  auto dst = q.coeffs();
  f.for_each_mode([&](int i, int j, int k, std::size_t n) {
    const double lambda = d.eigenvalue(i, j, k);
    dst[n] = lambda == 0.0 ? 0.0 : -f[n] / lambda;
  });
  return q;
}

VectorField helmholtz_leray_project(const VectorField& u) {
  SpectralField div = divergence(u);
  // The (0,0,0) divergence mode is sum_a k_a(0) u_a = 0 identically.
  if (std::abs(div[0]) > 1e-12) {
    throw StructuralError("projection: mean divergence is not zero");
  }
  div[0] = 0.0;
  VectorField out = u;
  out -= gradient(solve_poisson(div));
  return out;
}

double poincare_constant(const Domain& d) {
  double longest = 0.0;
  for (int a = 0; a < d.dim; ++a) longest = std::max(longest, d.extents[a]);
  return longest * longest / (kPi * kPi);
}

namespace {

double weighted_sum(const SpectralField& c, double s) {
  const Domain& d = c.domain();
  double sum = 0.0;
  c.for_each_mode([&](int i, int j, int k, std::size_t n) {
    if (c[n] == 0.0) return;
    sum += c[n] * c[n] * std::pow(1.0 + d.eigenvalue(i, j, k), s);
  });
  return sum;
}

}  // namespace

double sobolev_norm(const SpectralField& c, double s) {
  if (s < 0.0) throw std::invalid_argument("sobolev_norm: s must be >= 0");
  if (!c.is_cosine()) throw StructuralError("sobolev_norm requires cosine parity");
  return std::sqrt(weighted_sum(c, s));
}

double sobolev_norm(const VectorField& v, double s) {
  if (s < 0.0) throw std::invalid_argument("sobolev_norm: s must be >= 0");
  double sum = 0.0;
  for (const auto& comp : v.components) sum += weighted_sum(comp, s);
  return std::sqrt(sum);
}

}  // namespace chhs
