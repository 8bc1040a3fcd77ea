#pragma once

#include "sphereflow/domain.hpp"

namespace sphereflow {

/// Cut-off level K, exponent p and the Poincare constant used in C(K).
struct CutoffParams {
  double K = 1.0;
  double p = 2.0;
  double lambda1 = 1.0;

  /// Throws InvalidArgument unless K > 0, p >= 2, lambda1 > 0.
  void validate() const;
};

/// Pointwise |u|^{p-2} u.
Field nonlinearity(const Field& u, double p);

/// E(u) = 1/2 ||grad u||^2 + 1/p ||u||_p^p.
double energy(const Domain& domain, const Field& u, double p);

/// lambda(u) = ||grad u||^2 + ||u||_p^p, the Lagrange multiplier of the
/// unit-sphere constraint.
double multiplier(const Domain& domain, const Field& u, double p);

/// w - (w,u) u for unit-norm u.
Field tangent_project(const Domain& domain, const Field& u, const Field& w);

/// Au + N(u) - lambda(u) u. Equals the tangent projection of grad E only on
/// the unit sphere, which is therefore a precondition (tolerance 1e-6).
Field constrained_gradient(const Domain& domain, const Field& u, double p);

/// g^K(u) = S u when S = lambda(u) <= K, else (K^2 / S) u.
Field cutoff_g(const Domain& domain, const Field& u, const CutoffParams& params);

/// G^K(u) = Au + N(u) - g^K(u).
Field modified_operator(const Domain& domain, const Field& u, const CutoffParams& params);

/// C(K) = [1 + (2 + p^2 2^{2p-3}) K / lambda1] K. This is also the shift
/// Gamma_K = max{C(K), K}, since C(K) > K. Throws InvalidArgument when the
/// power of two overflows.
double monotonicity_constant(const CutoffParams& params);

/// 1/2 (||u||^2 - 1).
double constraint_value(const Domain& domain, const Field& u);

}  // namespace sphereflow
