#include "sphereflow/functionals.hpp"

#include <cmath>
#include <string>

#include "sphereflow/errors.hpp"

namespace sphereflow {

namespace {

void require_p(double p) {
  if (!(p >= 2.0)) throw InvalidArgument("p ≥ 2 required");
}

void require_unit(const Domain& domain, const Field& u, double tol) {
  const double n = l2_norm(domain, u);
  if (!(std::abs(n - 1.0) <= tol)) {
    throw InvalidArgument("field must lie on the unit sphere (||u|| = " + std::to_string(n) + ")");
  }
}

}  // namespace

void CutoffParams::validate() const {
  if (!(K > 0.0) || !std::isfinite(K)) throw InvalidArgument("cut-off level K must be positive");
  require_p(p);
  if (!(lambda1 > 0.0) || !std::isfinite(lambda1)) throw InvalidArgument("lambda1 must be positive");
}

Field nonlinearity(const Field& u, double p) {
  require_p(p);
  Field out = u;
  if (p == 2.0) return out;
  for (double& v : out.values()) {
    if (p == 4.0) {
      v = v * v * v;
    } else {
      v = std::pow(std::abs(v), p - 2.0) * v;
    }
  }
  return out;
}

double energy(const Domain& domain, const Field& u, double p) {
  require_p(p);
  return 0.5 * h1_seminorm_sq(domain, u) + lp_norm_p(domain, u, p) / p;
}

double multiplier(const Domain& domain, const Field& u, double p) {
  require_p(p);
  return h1_seminorm_sq(domain, u) + lp_norm_p(domain, u, p);
}

Field tangent_project(const Domain& domain, const Field& u, const Field& w) {
  require_conforming(domain, w);
  require_unit(domain, u, 1e-8);
  Field out = w;
  out.axpy(-inner(domain, w, u), u);
  return out;
}

Field constrained_gradient(const Domain& domain, const Field& u, double p) {
  require_p(p);
  require_unit(domain, u, 1e-6);
  Field au = apply_A(domain, u);
  const double lambda = inner(domain, au, u) + lp_norm_p(domain, u, p);
  au += nonlinearity(u, p);
  au.axpy(-lambda, u);
  return au;
}

Field cutoff_g(const Domain& domain, const Field& u, const CutoffParams& params) {
  params.validate();
  const double s = multiplier(domain, u, params.p);
  const double factor = s <= params.K ? s : params.K * params.K / s;
  return factor * u;
}

Field modified_operator(const Domain& domain, const Field& u, const CutoffParams& params) {
  Field out = apply_A(domain, u);
  out += nonlinearity(u, params.p);
  out -= cutoff_g(domain, u, params);
  return out;
}

double monotonicity_constant(const CutoffParams& params) {
  params.validate();
  const double pow2 = std::exp2(2.0 * params.p - 3.0);
  const double c = (1.0 + (2.0 + params.p * params.p * pow2) * params.K / params.lambda1) * params.K;
  if (!std::isfinite(pow2) || !std::isfinite(c)) {
    throw InvalidArgument("monotonicity constant overflows for p = " + std::to_string(params.p));
  }
  return c;
}

double constraint_value(const Domain& domain, const Field& u) {
  return 0.5 * (inner(domain, u, u) - 1.0);
}

}  // namespace sphereflow
