#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "sphereflow/domain.hpp"

namespace sphereflow {

inline constexpr std::size_t kDefaultSpectrumCap = std::size_t{1} << 24;

/// Node cap for eigenbasis storage; honours SPHEREFLOW_SPECTRUM_CAP.
std::size_t spectrum_cap_from_env();

/// Tensorized eigenpairs of the discrete Dirichlet Laplacian.
///
/// Eigenvectors are e_k(x_j) = prod_i sqrt(2/L_i) sin(pi j_i k_i / (n_i+1)),
/// orthonormal in the weighted inner product. Coefficient vectors share the
/// row-major layout of nodal fields, with mode index k_i - 1 in place of node
/// index j_i - 1. Transforms are DST-I per axis.
class Spectrum {
 public:
  const Domain& domain() const noexcept { return domain_; }

  std::span<const double> axis_eigenvalues(int axis) const;
  /// Combined eigenvalues in coefficient layout.
  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
  double lambda_min() const noexcept { return lambda_min_; }
  double lambda_max() const noexcept { return lambda_max_; }

  /// c_k = (e_k, u).
  std::vector<double> to_coefficients(const Field& u) const;
  /// u = sum_k c_k e_k.
  Field from_coefficients(std::span<const double> coeffs) const;

  /// Normalized eigenvector for a 1-based multi-index (one entry per axis).
  Field mode(std::span<const std::size_t> k) const;
  /// The positive ground mode e_(1,...,1).
  Field ground_mode() const;

 private:
  friend Spectrum compute_spectrum(const Domain&, std::size_t);
  struct Plan;

  Domain domain_;
  std::vector<std::vector<double>> axis_eigenvalues_;
  std::vector<double> eigenvalues_;
  double lambda_min_ = 0.0;
  double lambda_max_ = 0.0;
  double forward_scale_ = 1.0;
  double backward_scale_ = 1.0;
  std::shared_ptr<const Plan> plan_;

  void transform(std::span<double> data) const;
};

Spectrum compute_spectrum(const Domain& domain, std::size_t cap = spectrum_cap_from_env());

/// phi(A) u through the eigenbasis: coefficients scaled by phi(lambda_k).
Field apply_phi_of_A(const Spectrum& spectrum, const std::function<double(double)>& phi,
                     const Field& u);

/// Same as apply_phi_of_A with the per-mode multipliers precomputed.
Field apply_multipliers(const Spectrum& spectrum, std::span<const double> multipliers,
                        const Field& u);

/// ||A^alpha u||.
double fractional_norm(const Spectrum& spectrum, const Field& u, double alpha);

}  // namespace sphereflow
