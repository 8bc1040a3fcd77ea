#include "sphereflow/domain.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sphereflow/errors.hpp"

namespace sphereflow {

std::size_t GridShape::total() const noexcept {
  if (dim <= 0) return 0;
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= sizes[static_cast<std::size_t>(a)];
  return n;
}

Domain make_domain(int dim, std::span<const double> lengths, std::span<const std::size_t> sizes) {
  if (dim < 1 || dim > kMaxDim) {
    throw InvalidArgument("dimension must be 1, 2 or 3, got " + std::to_string(dim));
  }
  if (lengths.size() != static_cast<std::size_t>(dim) || sizes.size() != static_cast<std::size_t>(dim)) {
    throw InvalidArgument("lengths and sizes must have one entry per axis");
  }
  Domain d;
  d.shape_.dim = dim;
  d.cell_volume_ = 1.0;
  for (std::size_t a = 0; a < lengths.size(); ++a) {
    if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a])) {
      throw InvalidArgument("axis " + std::to_string(a) + ": length must be positive and finite");
    }
    if (sizes[a] < 2) {
      throw InvalidArgument("axis " + std::to_string(a) + ": at least 2 interior nodes required");
    }
    d.shape_.sizes[a] = sizes[a];
    d.lengths_[a] = lengths[a];
    d.spacings_[a] = lengths[a] / static_cast<double>(sizes[a] + 1);
    d.cell_volume_ *= d.spacings_[a];
    const double k = std::numbers::pi / lengths[a];
    d.lambda1_ += k * k;
  }
  for (int a = 0; a < dim; ++a) d.lambda1_discrete_ += d.axis_eigenvalue(a, 1);
  return d;
}

double Domain::axis_eigenvalue(int axis, std::size_t k) const {
  const std::size_t n = size(axis);
  if (k < 1 || k > n) throw InvalidArgument("mode index out of range");
  const double h = spacing(axis);
  const double s = std::sin(static_cast<double>(k) * std::numbers::pi / (2.0 * static_cast<double>(n + 1)));
  return 4.0 / (h * h) * s * s;
}

Field::Field(const Domain& domain) : shape_(domain.shape()), values_(domain.total(), 0.0) {}

Field::Field(const Domain& domain, std::vector<double> values)
    : shape_(domain.shape()), values_(std::move(values)) {
  if (values_.size() != domain.total()) {
    throw DomainMismatch("field has " + std::to_string(values_.size()) + " values, domain has " +
                         std::to_string(domain.total()) + " nodes");
  }
}

bool Field::all_finite() const noexcept {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Field& Field::operator+=(const Field& other) {
  if (shape_ != other.shape_) throw DomainMismatch("field shapes differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  if (shape_ != other.shape_) throw DomainMismatch("field shapes differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

Field& Field::axpy(double a, const Field& x) {
  if (shape_ != x.shape_) throw DomainMismatch("field shapes differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

void require_conforming(const Domain& domain, const Field& f) {
  if (!f.conforms_to(domain)) throw DomainMismatch("field does not conform to domain");
}

Field apply_A(const Domain& domain, const Field& u) {
  require_conforming(domain, u);
  Field out(domain);
  auto in = u.values();
  auto res = out.values();
  const auto& s = domain.shape();
  std::size_t inner_stride = 1;
  for (int a = s.dim - 1; a >= 0; --a) {
    const std::size_t n = s.sizes[static_cast<std::size_t>(a)];
    const double h = domain.spacing(a);
    const double w = 1.0 / (h * h);
    const std::size_t block = n * inner_stride;
    const std::size_t outer = u.size() / block;
    for (std::size_t o = 0; o < outer; ++o) {
      const std::size_t base = o * block;
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t row = base + j * inner_stride;
        for (std::size_t i = 0; i < inner_stride; ++i) {
          const std::size_t idx = row + i;
          double v = 2.0 * in[idx];
          if (j > 0) v -= in[idx - inner_stride];
          if (j + 1 < n) v -= in[idx + inner_stride];
          res[idx] += w * v;
        }
      }
    }
    inner_stride = block;
  }
  return out;
}

double inner(const Domain& domain, const Field& f, const Field& g) {
  require_conforming(domain, f);
  require_conforming(domain, g);
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * g[i];
  return domain.cell_volume() * sum;
}

double l2_norm(const Domain& domain, const Field& f) { return std::sqrt(inner(domain, f, f)); }

double lp_norm_p(const Domain& domain, const Field& f, double p) {
  if (!(p >= 2.0)) throw InvalidArgument("p ≥ 2 required");
  require_conforming(domain, f);
  double sum = 0.0;
  if (p == 2.0) {
    for (double v : f.values()) sum += v * v;
  } else if (p == 4.0) {
    for (double v : f.values()) sum += (v * v) * (v * v);
  } else {
    for (double v : f.values()) sum += std::pow(std::abs(v), p);
  }
  return domain.cell_volume() * sum;
}

double h1_seminorm_sq(const Domain& domain, const Field& f) {
  return inner(domain, apply_A(domain, f), f);
}

Field restrict_injection(const Domain& fine, const Field& u, const Domain& coarse) {
  require_conforming(fine, u);
  if (fine.dim() != coarse.dim()) throw DomainMismatch("restriction needs equal dimensions");
  std::array<std::size_t, kMaxDim> ratio{};
  for (int a = 0; a < fine.dim(); ++a) {
    const std::size_t nf = fine.size(a) + 1;
    const std::size_t nc = coarse.size(a) + 1;
    if (nf % nc != 0 || std::abs(fine.length(a) - coarse.length(a)) > 1e-12 * fine.length(a)) {
      throw DomainMismatch("coarse nodes are not a subset of the fine nodes");
    }
    ratio[static_cast<std::size_t>(a)] = nf / nc;
  }
  Field out(coarse);
  const auto& cs = coarse.shape();
  const auto& fs = fine.shape();
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    std::size_t rem = flat;
    std::size_t fine_flat = 0;
    std::size_t stride = 1;
    for (int a = cs.dim - 1; a >= 0; --a) {
      const auto ua = static_cast<std::size_t>(a);
      const std::size_t jc = rem % cs.sizes[ua];
      rem /= cs.sizes[ua];
      const std::size_t jf = (jc + 1) * ratio[ua] - 1;
      fine_flat += jf * stride;
      stride *= fs.sizes[ua];
    }
    out[flat] = u[fine_flat];
  }
  return out;
}

}  // namespace sphereflow
