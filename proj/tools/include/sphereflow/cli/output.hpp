#pragma once

#include <chrono>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "sphereflow/cli/config.hpp"
#include "sphereflow/flow.hpp"
#include "sphereflow/verify.hpp"

namespace sphereflow::cli {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Shortest-safe round-trip decimal: printf "%.17g".
std::string format_double(double v);

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

void write_timeseries_csv(std::ostream& out, std::span<const DiagnosticsRecord> series);

/// energy_decay.dat (t, E - E_min), norm_drift.dat (t, ||u|| - 1) and
/// residual.dat (t, ||grad_M E||) inside dir.
std::vector<std::filesystem::path> write_plotdata(const std::filesystem::path& dir,
                                                  std::span<const DiagnosticsRecord> series);

/// Creates dir (and parents) and checks that it accepts files.
void prepare_output_dir(const std::filesystem::path& dir);

void write_text(const std::filesystem::path& path, std::string_view text);

Json effective_config_json(const RunConfig& config);
Json report_json(const PropertyReport& report);

struct RunManifest {
  std::string config_digest;
  std::string config_source;
  Json domain;
  Json effective_config;
  std::vector<std::filesystem::path> outputs;
  std::string tool_version{kToolVersion};
  std::uint64_t seed = 0;
  std::string command;
  std::string started_utc;
  double wall_seconds = 0.0;
  Json result;

  Json to_json() const;
};

RunManifest make_manifest(const RunConfig& config, std::string command);

std::string utc_timestamp(std::chrono::system_clock::time_point t);

}  // namespace sphereflow::cli
