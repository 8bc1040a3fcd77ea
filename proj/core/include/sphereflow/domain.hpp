#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace sphereflow {

inline constexpr int kMaxDim = 3;

/// Number of axes plus interior node count per axis. Two fields conform
/// when their shapes compare equal.
struct GridShape {
  int dim = 0;
  std::array<std::size_t, kMaxDim> sizes{};

  std::size_t total() const noexcept;
  bool operator==(const GridShape&) const = default;
};

/// Axis-aligned box (0,L_1) x ... x (0,L_d) with n_i interior nodes per axis
/// and homogeneous Dirichlet boundary. Immutable once built by make_domain.
class Domain {
 public:
  int dim() const noexcept { return shape_.dim; }
  const GridShape& shape() const noexcept { return shape_; }
  std::size_t total() const noexcept { return shape_.total(); }

  double length(int axis) const { return lengths_.at(static_cast<std::size_t>(axis)); }
  std::size_t size(int axis) const { return shape_.sizes.at(static_cast<std::size_t>(axis)); }
  double spacing(int axis) const { return spacings_.at(static_cast<std::size_t>(axis)); }

  /// Quadrature weight of one interior node, the product of the spacings.
  double cell_volume() const noexcept { return cell_volume_; }

  /// Continuum first Dirichlet eigenvalue, sum of (pi/L_i)^2.
  double lambda1() const noexcept { return lambda1_; }
  /// First eigenvalue of the discrete 3-point-per-axis operator.
  double lambda1_discrete() const noexcept { return lambda1_discrete_; }

  /// k-th eigenvalue (k = 1..n_i) of the 1D stencil along one axis,
  /// (4/h^2) sin^2(k pi / (2(n+1))).
  double axis_eigenvalue(int axis, std::size_t k) const;

  bool operator==(const Domain&) const = default;

 private:
  friend Domain make_domain(int, std::span<const double>, std::span<const std::size_t>);

  GridShape shape_;
  std::array<double, kMaxDim> lengths_{};
  std::array<double, kMaxDim> spacings_{};
  double cell_volume_ = 0.0;
  double lambda1_ = 0.0;
  double lambda1_discrete_ = 0.0;
};

Domain make_domain(int dim, std::span<const double> lengths, std::span<const std::size_t> sizes);

/// Real grid function on the interior nodes, row-major over axes (last axis
/// fastest). Boundary values are implicitly zero and never stored.
class Field {
 public:
  Field() = default;
  explicit Field(const Domain& domain);
  Field(const Domain& domain, std::vector<double> values);

  const GridShape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  bool conforms_to(const Domain& domain) const noexcept { return shape_ == domain.shape(); }
  bool all_finite() const noexcept;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s) noexcept;
  /// this += a * x
  Field& axpy(double a, const Field& x);

  bool operator==(const Field&) const = default;

 private:
  GridShape shape_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Throws DomainMismatch unless f conforms to the domain.
void require_conforming(const Domain& domain, const Field& f);

/// Centered second-order -Laplacian with zero Dirichlet data.
Field apply_A(const Domain& domain, const Field& u);

/// (f,g) := (prod h_i) sum f_j g_j.
double inner(const Domain& domain, const Field& f, const Field& g);
double l2_norm(const Domain& domain, const Field& f);

/// p-th power of the L^p norm, (prod h_i) sum |f_j|^p. Requires p >= 2.
double lp_norm_p(const Domain& domain, const Field& f, double p);

/// Discrete Dirichlet energy (Af, f), so summation by parts is exact.
double h1_seminorm_sq(const Domain& domain, const Field& f);

/// Field sampled at interior nodes from a function of the node coordinates.
template <class Fn>
Field sample(const Domain& domain, Fn&& fn) {
  Field out(domain);
  const auto& s = domain.shape();
  std::array<std::size_t, kMaxDim> idx{};
  std::array<double, kMaxDim> x{};
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    std::size_t rem = flat;
    for (int a = s.dim - 1; a >= 0; --a) {
      const auto ua = static_cast<std::size_t>(a);
      idx[ua] = rem % s.sizes[ua];
      rem /= s.sizes[ua];
      x[ua] = static_cast<double>(idx[ua] + 1) * domain.spacing(a);
    }
    out[flat] = fn(std::span<const double>(x.data(), static_cast<std::size_t>(s.dim)));
  }
  return out;
}

/// Injection of a fine-grid field onto a coarse grid whose nodes are a
/// subset of the fine nodes; requires (n_fine + 1) = r (n_coarse + 1) per axis.
Field restrict_injection(const Domain& fine, const Field& u, const Domain& coarse);

}  // namespace sphereflow
