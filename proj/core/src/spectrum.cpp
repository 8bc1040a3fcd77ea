#include "sphereflow/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numbers>
#include <string>

#include "sphereflow/errors.hpp"

namespace sphereflow {

namespace {

// The FFTW planner and plan destruction are not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct Spectrum::Plan {
  fftw_plan handle = nullptr;

  ~Plan() {
    if (handle != nullptr) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(handle);
    }
  }
};

std::size_t spectrum_cap_from_env() {
  if (const char* env = std::getenv("SPHEREFLOW_SPECTRUM_CAP"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != nullptr && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    throw InvalidArgument(std::string("SPHEREFLOW_SPECTRUM_CAP is not a positive integer: ") + env);
  }
  return kDefaultSpectrumCap;
}

Spectrum compute_spectrum(const Domain& domain, std::size_t cap) {
  const std::size_t total = domain.total();
  if (total > cap) {
    throw CapacityError("spectrum needs " + std::to_string(total) + " nodes, cap is " +
                        std::to_string(cap));
  }
  Spectrum s;
  s.domain_ = domain;
  const int dim = domain.dim();
  s.axis_eigenvalues_.resize(static_cast<std::size_t>(dim));
  std::array<int, kMaxDim> n{};
  std::array<fftw_r2r_kind, kMaxDim> kinds{};
  s.forward_scale_ = 1.0;
  s.backward_scale_ = 1.0;
  for (int a = 0; a < dim; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    const std::size_t na = domain.size(a);
    auto& ev = s.axis_eigenvalues_[ua];
    ev.resize(na);
    for (std::size_t k = 1; k <= na; ++k) ev[k - 1] = domain.axis_eigenvalue(a, k);
    n[ua] = static_cast<int>(na);
    kinds[ua] = FFTW_RODFT00;
    // RODFT00 computes 2 sum_j x_j sin(pi (j+1)(k+1)/(n+1)) per axis.
    const double norm = std::sqrt(2.0 / domain.length(a));
    s.forward_scale_ *= domain.spacing(a) * norm / 2.0;
    s.backward_scale_ *= norm / 2.0;
  }

  s.eigenvalues_.assign(total, 0.0);
  std::size_t inner_stride = 1;
  for (int a = dim - 1; a >= 0; --a) {
    const auto& ev = s.axis_eigenvalues_[static_cast<std::size_t>(a)];
    const std::size_t na = ev.size();
    for (std::size_t flat = 0; flat < total; ++flat) {
      s.eigenvalues_[flat] += ev[(flat / inner_stride) % na];
    }
    inner_stride *= na;
  }
  s.lambda_min_ = 0.0;
  s.lambda_max_ = 0.0;
  for (const auto& ev : s.axis_eigenvalues_) {
    s.lambda_min_ += ev.front();
    s.lambda_max_ += ev.back();
  }

  std::vector<double> scratch(total, 0.0);
  auto plan = std::make_shared<Spectrum::Plan>();
  {
    std::lock_guard lock(planner_mutex());
    plan->handle = fftw_plan_r2r(dim, n.data(), scratch.data(), scratch.data(), kinds.data(),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  if (plan->handle == nullptr) throw Error("FFTW could not plan the sine transform");
  s.plan_ = std::move(plan);
  return s;
}

std::span<const double> Spectrum::axis_eigenvalues(int axis) const {
  return axis_eigenvalues_.at(static_cast<std::size_t>(axis));
}

void Spectrum::transform(std::span<double> data) const {
  fftw_execute_r2r(plan_->handle, data.data(), data.data());
}

std::vector<double> Spectrum::to_coefficients(const Field& u) const {
  require_conforming(domain_, u);
  std::vector<double> c(u.values().begin(), u.values().end());
  transform(c);
  for (double& v : c) v *= forward_scale_;
  return c;
}

Field Spectrum::from_coefficients(std::span<const double> coeffs) const {
  if (coeffs.size() != domain_.total()) throw DomainMismatch("coefficient vector has wrong length");
  Field u(domain_, std::vector<double>(coeffs.begin(), coeffs.end()));
  transform(u.values());
  u *= backward_scale_;
  return u;
}

Field Spectrum::mode(std::span<const std::size_t> k) const {
  const int dim = domain_.dim();
  if (k.size() != static_cast<std::size_t>(dim)) throw InvalidArgument("mode index needs one entry per axis");
  for (int a = 0; a < dim; ++a) {
    if (k[static_cast<std::size_t>(a)] < 1 || k[static_cast<std::size_t>(a)] > domain_.size(a)) {
      throw InvalidArgument("mode index out of range");
    }
  }
  return sample(domain_, [&](std::span<const double> x) {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const double L = domain_.length(a);
      v *= std::sqrt(2.0 / L) * std::sin(static_cast<double>(k[ua]) * std::numbers::pi * x[ua] / L);
    }
    return v;
  });
}

Field Spectrum::ground_mode() const {
  std::array<std::size_t, kMaxDim> ones{1, 1, 1};
  return mode(std::span<const std::size_t>(ones.data(), static_cast<std::size_t>(domain_.dim())));
}

Field apply_multipliers(const Spectrum& spectrum, std::span<const double> multipliers,
                        const Field& u) {
  if (multipliers.size() != spectrum.eigenvalues().size()) {
    throw InvalidArgument("multiplier vector has wrong length");
  }
  auto c = spectrum.to_coefficients(u);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= multipliers[k];
  return spectrum.from_coefficients(c);
}

Field apply_phi_of_A(const Spectrum& spectrum, const std::function<double(double)>& phi,
                     const Field& u) {
  const auto lambdas = spectrum.eigenvalues();
  std::vector<double> m(lambdas.size());
  for (std::size_t k = 0; k < m.size(); ++k) {
    m[k] = phi(lambdas[k]);
    if (!std::isfinite(m[k])) {
      throw InvalidArgument("phi is not finite at eigenvalue " + std::to_string(lambdas[k]));
    }
  }
  return apply_multipliers(spectrum, m, u);
}

double fractional_norm(const Spectrum& spectrum, const Field& u, double alpha) {
  const auto c = spectrum.to_coefficients(u);
  const auto lambdas = spectrum.eigenvalues();
  double sum = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double w = std::pow(lambdas[k], alpha) * c[k];
    sum += w * w;
  }
  return std::sqrt(sum);
}

}  // namespace sphereflow
