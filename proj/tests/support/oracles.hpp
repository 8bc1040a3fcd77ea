#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

#include "sphereflow/domain.hpp"

namespace sphereflow::testing {

/// Dense discrete Dirichlet Laplacian assembled as a Kronecker sum of 1D
/// tridiagonal matrices, row-major node ordering.
inline Eigen::MatrixXd dense_laplacian(const Domain& d) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(1, 1);
  for (int a = 0; a < d.dim(); ++a) {
    const auto n = static_cast<Eigen::Index>(d.size(a));
    const double h = d.spacing(a);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      T(i, i) = 2.0 / (h * h);
      if (i > 0) T(i, i - 1) = -1.0 / (h * h);
      if (i + 1 < n) T(i, i + 1) = -1.0 / (h * h);
    }
    if (a == 0) {
      A = T;
      continue;
    }
    const Eigen::Index m = A.rows();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m * n, m * n);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        K.block(i * n, j * n, n, n) += A(i, j) * Eigen::MatrixXd::Identity(n, n);
      }
      K.block(i * n, i * n, n, n) += T;
    }
    A = K;
  }
  return A;
}

struct DenseSpectrum {
  Eigen::VectorXd values;
  /// Columns normalized in the weighted inner product.
  Eigen::MatrixXd vectors;
};

inline DenseSpectrum dense_spectrum(const Domain& d) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_laplacian(d));
  return {es.eigenvalues(), es.eigenvectors() / std::sqrt(d.cell_volume())};
}

inline Eigen::VectorXd to_eigen(const Field& f) {
  return Eigen::Map<const Eigen::VectorXd>(f.values().data(), static_cast<Eigen::Index>(f.size()));
}

inline Field from_eigen(const Domain& d, const Eigen::VectorXd& v) {
  return Field(d, std::vector<double>(v.data(), v.data() + v.size()));
}

/// First eigenvector with a positive sum.
inline Field dense_ground_mode(const Domain& d) {
  const DenseSpectrum s = dense_spectrum(d);
  Eigen::VectorXd v = s.vectors.col(0);
  if (v.sum() < 0.0) v = -v;
  return from_eigen(d, v);
}

inline Domain interval(double L, std::size_t n) {
  const double lengths[] = {L};
  const std::size_t sizes[] = {n};
  return make_domain(1, lengths, sizes);
}

inline Domain box(std::vector<double> L, std::vector<std::size_t> n) {
  return make_domain(static_cast<int>(L.size()), L, n);
}

}  // namespace sphereflow::testing
