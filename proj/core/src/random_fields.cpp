#include "sphereflow/random_fields.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sphereflow/errors.hpp"

namespace sphereflow {

double UniformSource::log_uniform(double lo, double hi) {
  return std::pow(10.0, uniform(std::log10(lo), std::log10(hi)));
}

RandomFieldGenerator::RandomFieldGenerator(const Spectrum& spectrum, std::uint64_t seed)
    : spectrum_(&spectrum), rng_(seed) {
  const auto lambdas = spectrum.eigenvalues();
  std::vector<std::size_t> order(lambdas.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lambdas[a] < lambdas[b]; });
  const std::size_t keep = std::max<std::size_t>(1, order.size() / 4);
  low_modes_.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
  std::sort(low_modes_.begin(), low_modes_.end());
}

Field RandomFieldGenerator::draw(FieldPopulation population, double norm) {
  std::vector<double> c(spectrum_->eigenvalues().size(), 0.0);
  if (population == FieldPopulation::low_pass) {
    for (std::size_t k : low_modes_) c[k] = rng_.uniform(-1.0, 1.0);
  } else {
    for (double& v : c) v = rng_.uniform(-1.0, 1.0);
  }
  Field u = spectrum_->from_coefficients(c);
  const double n = l2_norm(spectrum_->domain(), u);
  if (n > 0.0) u *= norm / n;
  return u;
}

}  // namespace sphereflow
