#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sphereflow/domain.hpp"
#include "sphereflow/spectrum.hpp"

namespace sphereflow {

/// Seeded uniform variates. The engine's output sequence is fixed by the
/// standard and the mapping to [0,1) is done here, so draws are identical
/// across standard libraries.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double canonical() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * canonical(); }
  /// 10^U(log10 lo, log10 hi).
  double log_uniform(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

enum class FieldPopulation {
  low_pass,  ///< uniform coefficients on the lowest 25% of modes
  rough,     ///< uniform coefficients on all modes
};

/// Random eigen-expansions over a fixed spectrum.
class RandomFieldGenerator {
 public:
  RandomFieldGenerator(const Spectrum& spectrum, std::uint64_t seed);

  /// Field from the given population rescaled to the requested L2 norm.
  Field draw(FieldPopulation population, double norm);

  UniformSource& source() noexcept { return rng_; }

 private:
  const Spectrum* spectrum_;
  UniformSource rng_;
  std::vector<std::size_t> low_modes_;
};

}  // namespace sphereflow
