#pragma once

#include <cstdint>
#include <filesystem>

#include "sphereflow/domain.hpp"
#include "sphereflow/errors.hpp"

namespace sphereflow::cli {

inline constexpr std::uint32_t kSnapshotVersion = 1;

/// Layout (little-endian): "SPHF", u32 version, u32 d, u64 n_i (d times),
/// f64 L_i (d times), f64 t, f64 p, then the node values as f64, row-major.
struct SnapshotFile {
  Domain domain;
  Field field;
  double t = 0.0;
  double p = 2.0;
};

void write_snapshot(const Domain& domain, const Field& field, double t, double p,
                    const std::filesystem::path& path);

/// Throws FormatError on a wrong magic, unknown version, truncated body or
/// trailing bytes.
SnapshotFile read_snapshot(const std::filesystem::path& path);

}  // namespace sphereflow::cli
