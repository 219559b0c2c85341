// Cosine/sine eigenbasis on Neumann boxes: fields, fast transforms,
// differential operators and the Helmholtz-Leray projection.
//
// Basis convention: on an axis of length L the orthonormal cosine family is
//   e_0 = 1/sqrt(L),  e_i = sqrt(2/L) cos(i pi x / L)   (i >= 1)
// and the sine family (used for velocity components normal to that axis) is
//   s_i = sqrt(2/L) sin(i pi x / L)                     (i >= 1).
// Multi-dimensional basis functions are tensor products, so coefficients are
// plain L2 inner products and Parseval holds without weights.
//
// Grid values live on cell midpoints x_p = (p + 1/2) L / M, with M = N or 2N
// (dealiasing padding). Arrays are stored with the x index fastest:
//   idx = i + Nx * (j + Ny * k).
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace chhs {

/// Raised when fields of incompatible shape, domain or parity are combined.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Parity : std::uint8_t { kCosine, kSine };
using Parities = std::array<Parity, 3>;

inline constexpr Parities kCosineParity{Parity::kCosine, Parity::kCosine,
                                        Parity::kCosine};

/// Parity of velocity component `axis`: sine along `axis`, cosine elsewhere.
/// This is what makes v.n = 0 hold identically on the box faces.
Parities velocity_parity(int axis);

std::string parity_string(const Parities& p, int dim);
Parities parse_parity(const std::string& s);

struct Domain {
  int dim = 2;
  std::array<double, 3> extents{1.0, 1.0, 1.0};
  std::array<int, 3> modes{8, 8, 1};
  double epsilon = 1.0;
  double gamma = 1.0;

  static Domain square(double length, int n, double epsilon = 1.0,
                       double gamma = 1.0);
  static Domain rect(double lx, double ly, int nx, int ny,
                     double epsilon = 1.0, double gamma = 1.0);
  static Domain box(double lx, double ly, double lz, int nx, int ny, int nz,
                    double epsilon = 1.0, double gamma = 1.0);

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;

  std::size_t size() const;
  double volume() const;
  double wavenumber(int axis, int index) const;
  double eigenvalue(int i, int j, int k) const;

  /// Same dim, extents and mode counts (epsilon/gamma are not compared).
  bool same_space(const Domain& other) const;
  /// Index of mode (i, j, k) in coefficient arrays.
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(modes[0]) *
               (static_cast<std::size_t>(j) +
                static_cast<std::size_t>(modes[1]) * static_cast<std::size_t>(k));
  }
};

/// Grid values of a scalar on the midpoint collocation grid. `padding`
/// multiplies the node count on every active axis.
class ScalarField {
 public:
  ScalarField(const Domain& domain, int padding = 1);
  ScalarField(const Domain& domain, std::vector<double> values,
              int padding = 1);

  /// Samples f(x, y, z) on the collocation nodes.
  static ScalarField sample(
      const Domain& domain,
      const std::function<double(double, double, double)>& f,
      int padding = 1);

  const Domain& domain() const { return domain_; }
  int padding() const { return padding_; }
  std::array<int, 3> grid() const;
  double node(int axis, int p) const;
  double cell_volume() const;

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t n) { return values_[n]; }
  double operator[](std::size_t n) const { return values_[n]; }
  std::size_t size() const { return values_.size(); }

  double max_abs() const;
  bool all_finite() const;

 private:
  Domain domain_;
  int padding_;
  std::vector<double> values_;
};

/// Coefficients in the orthonormal eigenbasis, one slot per (i, j, k) with
/// i < Nx, j < Ny, k < Nz. On a sine axis slot 0 is structurally zero.
class SpectralField {
 public:
  explicit SpectralField(const Domain& domain,
                         const Parities& parity = kCosineParity);
  SpectralField(const Domain& domain, std::vector<double> coeffs,
                const Parities& parity = kCosineParity);

  const Domain& domain() const { return domain_; }
  const Parities& parity() const { return parity_; }
  bool is_cosine() const;

  std::span<double> coeffs() { return coeffs_; }
  std::span<const double> coeffs() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  double& operator[](std::size_t n) { return coeffs_[n]; }
  double operator[](std::size_t n) const { return coeffs_[n]; }
  double& at(int i, int j, int k = 0) { return coeffs_[domain_.index(i, j, k)]; }
  double at(int i, int j, int k = 0) const {
    return coeffs_[domain_.index(i, j, k)];
  }

  /// Spatial average; requires cosine parity.
  double mean() const;
  double max_abs() const;
  bool all_finite() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);
  /// this += s * other
  SpectralField& axpy(double s, const SpectralField& other);

  /// Calls f(i, j, k, n) for every mode, n being the flat index.
  template <typename F>
  void for_each_mode(F&& f) const {
    const auto& m = domain_.modes;
    std::size_t n = 0;
    for (int k = 0; k < m[2]; ++k)
      for (int j = 0; j < m[1]; ++j)
        for (int i = 0; i < m[0]; ++i, ++n) f(i, j, k, n);
  }

 private:
  void check_compatible(const SpectralField& other) const;

  Domain domain_;
  Parities parity_;
  std::vector<double> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// L2 inner product (coefficient dot product thanks to orthonormality).
double dot(const SpectralField& a, const SpectralField& b);
double norm_sq(const SpectralField& a);

/// One spectral field per spatial dimension; component a carries
/// velocity_parity(a).
struct VectorField {
  std::vector<SpectralField> components;

  static VectorField zero(const Domain& domain);
  const Domain& domain() const { return components.front().domain(); }
  int dim() const { return static_cast<int>(components.size()); }
  /// Throws StructuralError if the component count or parities are wrong.
  void check_velocity_layout() const;

  VectorField& operator+=(const VectorField& other);
  VectorField& operator-=(const VectorField& other);
  VectorField& operator*=(double s);
};

double dot(const VectorField& a, const VectorField& b);
double norm_sq(const VectorField& a);

// --- transforms ------------------------------------------------------------

/// Orthonormal coefficients of `f` with the requested parity. A padded input
/// is transformed on its own grid and truncated to the domain's mode counts,
/// which is the Galerkin projection of the sampled function.
SpectralField forward_transform(const ScalarField& f,
                                const Parities& parity = kCosineParity);

/// Evaluates the truncated expansion on the (optionally padded) grid.
ScalarField inverse_transform(const SpectralField& c, int padding = 1);

/// Caps the threads FFTW may use for plans created afterwards. Values < 1
/// select all hardware threads.
void set_transform_threads(int threads);
int transform_threads();

// --- operators -------------------------------------------------------------

SpectralField laplacian(const SpectralField& c);
/// Requires cosine parity. Component a comes out with sine parity on axis a.
VectorField gradient(const SpectralField& c);
/// Requires the velocity parity layout; result has cosine parity.
SpectralField divergence(const VectorField& v);
/// Solves the Neumann Poisson problem  lap q = f  (f cosine parity, mean of f
/// ignored) with mean(q) = 0.
SpectralField solve_poisson(const SpectralField& f);
/// u - grad q with lap q = div u. Divergence-free, zero normal trace.
VectorField helmholtz_leray_project(const VectorField& u);

/// 1 / (smallest nonzero Neumann eigenvalue) = (longest edge)^2 / pi^2.
double poincare_constant(const Domain& d);

/// (sum_k |c_k|^2 (1 + lambda_k)^s)^{1/2}; cosine parity, s >= 0.
double sobolev_norm(const SpectralField& c, double s);
/// Same weights applied to every component of a vector field.
double sobolev_norm(const VectorField& v, double s);

/// Eigenvalue lambda_k for every flat mode index.
std::vector<double> eigenvalues(const Domain& d);

}  // namespace chhs
