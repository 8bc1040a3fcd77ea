#include "sphereflow/resolvent.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <vector>

#include "sphereflow/errors.hpp"
#include "sphereflow/random_fields.hpp"

namespace sphereflow {

void CgSettings::validate() const {
  if (!(rel_tol > 0.0)) throw InvalidArgument("CG tolerance must be positive");
}

std::size_t CgSettings::iteration_cap(const Domain& domain) const {
  return max_iterations > 0 ? max_iterations : 10 * domain.total();
}

Field solve_shifted(const Domain& domain, double shift, const Field& rhs,
                    const CgSettings& settings, const Field* initial_guess, CgStats* stats) {
  settings.validate();
  require_conforming(domain, rhs);
  if (!(shift >= 0.0)) throw InvalidArgument("shift must be nonnegative");

  auto apply = [&](const Field& x) {
    Field y = apply_A(domain, x);
    if (shift != 0.0) y.axpy(shift, x);
    return y;
  };

  const double rhs_norm = l2_norm(domain, rhs);
  Field x = initial_guess != nullptr ? *initial_guess : Field(domain);
  if (rhs_norm == 0.0 && initial_guess == nullptr) {
    if (stats != nullptr) *stats = {0, 0.0};
    return x;
  }
  const double target = settings.rel_tol * rhs_norm;

  Field r = rhs;
  if (initial_guess != nullptr) r -= apply(x);
  double rr = inner(domain, r, r);
  Field d = r;
  const std::size_t cap = settings.iteration_cap(domain);
  std::size_t it = 0;
  while (std::sqrt(rr) > target) {
    if (it == cap) {
      const double rel = rhs_norm > 0.0 ? std::sqrt(rr) / rhs_norm : std::sqrt(rr);
      throw ConvergenceError("conjugate gradients did not converge (relative residual " +
                                 std::to_string(rel) + ")",
                             rel, it);
    }
    const Field q = apply(d);
    const double dq = inner(domain, d, q);
    if (!(dq > 0.0)) throw ConvergenceError("conjugate gradients broke down", std::sqrt(rr), it);
    const double alpha = rr / dq;
    x.axpy(alpha, d);
    r.axpy(-alpha, q);
    const double rr_new = inner(domain, r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = r[i] + beta * d[i];
    ++it;
  }
  if (stats != nullptr) {
    stats->iterations = it;
    stats->relative_residual = rhs_norm > 0.0 ? std::sqrt(rr) / rhs_norm : 0.0;
  }
  return x;
}

Field resolvent_solve(const Domain& domain, double mu, const Field& rhs, const CgSettings& settings) {
  if (!(mu > 0.0)) throw InvalidArgument("resolvent parameter mu must be positive");
  return solve_shifted(domain, mu, rhs, settings);
}

Field yosida(const Domain& domain, double mu, const Field& u, const CgSettings& settings) {
  Field x = resolvent_solve(domain, mu, u, settings);
  x *= mu;
  return x;
}

NormEstimate operator_norm_estimate(const LinearMap& op, const Domain& domain,
                                    std::size_t iterations, std::uint64_t seed) {
  if (iterations == 0) throw InvalidArgument("at least one iteration required");
  UniformSource rng(seed);
  Field q(domain);
  for (double& v : q.values()) v = rng.uniform(-1.0, 1.0);
  q *= 1.0 / l2_norm(domain, q);

  std::vector<Field> basis;
  std::vector<double> alpha;
  std::vector<double> beta;
  NormEstimate best;
  const std::size_t max_steps = std::min(iterations, domain.total());
  for (std::size_t j = 0; j < max_steps; ++j) {
    basis.push_back(q);
    Field w = op(q);
    require_conforming(domain, w);
    const double a = inner(domain, w, q);
    alpha.push_back(a);
    // Two passes of Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass) {
      for (const Field& b : basis) w.axpy(-inner(domain, w, b), b);
    }
    const double b = l2_norm(domain, w);

    const auto m = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub(std::max<Eigen::Index>(m - 1, 0));
    for (Eigen::Index i = 0; i + 1 < m; ++i) sub[i] = beta[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const auto& theta = tri.eigenvalues();
    const Eigen::Index top = std::abs(theta[0]) > std::abs(theta[m - 1]) ? 0 : m - 1;
    const double value = std::abs(theta[top]);
    const double ritz_residual = b * std::abs(tri.eigenvectors()(m - 1, top));

    best.value = value;
    best.iterations = j + 1;
    if (ritz_residual <= 1e-10 * value || b <= 1e-14 * std::max(value, 1e-300)) {
      best.converged = true;
      return best;
    }
    beta.push_back(b);
    q = std::move(w);
    q *= 1.0 / b;
  }
  best.converged = max_steps == domain.total();
  return best;
}

double lambda1_inverse_power(const Domain& domain, double rel_tol, std::size_t max_iterations) {
  CgSettings cg{.rel_tol = 1e-13, .max_iterations = 0};
  Field x(domain);
  for (double& v : x.values()) v = 1.0;
  x *= 1.0 / l2_norm(domain, x);
  double rq = h1_seminorm_sq(domain, x);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    Field y = solve_shifted(domain, 0.0, x, cg, &x);
    y *= 1.0 / l2_norm(domain, y);
    const double next = h1_seminorm_sq(domain, y);
    x = std::move(y);
    if (std::abs(next - rq) <= rel_tol * next) return next;
    rq = next;
  }
  return rq;
}

}  // namespace sphereflow
