#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "sphereflow/domain.hpp"

namespace sphereflow {

struct CgSettings {
  double rel_tol = 1e-10;
  /// 0 selects 10x the node count.
  std::size_t max_iterations = 0;

  void validate() const;
  std::size_t iteration_cap(const Domain& domain) const;
};

struct CgStats {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

/// Solves (shift I + A) x = rhs by conjugate gradients, shift >= 0.
/// Throws ConvergenceError (with the last relative residual) on failure.
Field solve_shifted(const Domain& domain, double shift, const Field& rhs,
                    const CgSettings& settings, const Field* initial_guess = nullptr,
                    CgStats* stats = nullptr);

/// (mu I + A)^{-1} rhs for mu > 0.
Field resolvent_solve(const Domain& domain, double mu, const Field& rhs,
                      const CgSettings& settings = {});

/// J_mu u = mu (mu I + A)^{-1} u.
Field yosida(const Domain& domain, double mu, const Field& u, const CgSettings& settings = {});

using LinearMap = std::function<Field(const Field&)>;

struct NormEstimate {
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Spectral-norm estimate of a symmetric operator. Power iterates from a
/// seeded random start span a Krylov space; the returned value is the
/// largest |Ritz value| over that space (Lanczos, full reorthogonalization),
/// so it never exceeds the true norm of an exactly symmetric operator.
/// Converged when the Ritz residual drops below 1e-10 relative or the
/// space becomes invariant; otherwise the best estimate is returned with
/// converged = false.
NormEstimate operator_norm_estimate(const LinearMap& op, const Domain& domain,
                                    std::size_t iterations, std::uint64_t seed);

/// Smallest eigenvalue of A by inverse power iteration, used to cross-check
/// the closed-form lambda1h.
double lambda1_inverse_power(const Domain& domain, double rel_tol = 1e-14,
                             std::size_t max_iterations = 500);

}  // namespace sphereflow
