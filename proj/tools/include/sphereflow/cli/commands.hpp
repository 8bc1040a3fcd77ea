#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sphereflow/cli/config.hpp"
#include "sphereflow/flow.hpp"
#include "sphereflow/stationary.hpp"

namespace sphereflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

struct GlobalOptions {
  std::optional<std::filesystem::path> config;
  /// Output directory; commands default to ./out.
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  std::string format = "csv";
};

std::filesystem::path output_dir(const GlobalOptions& options);

/// Loads --config and applies --seed.
RunConfig load_config(const GlobalOptions& options);

/// Initial field for the configuration, rescaled to initial.norm. The
/// spectrum is required for mode and random initial data.
Field make_initial(const RunConfig& config, const Domain& domain, const Spectrum* spectrum);

/// Spectrum of the domain, or nullopt when the grid exceeds the cap.
std::optional<Spectrum> try_spectrum(const Domain& domain);

/// Runs one configuration and writes timeseries.csv, snapshots/, plot/ and
/// manifest.json under out_dir.
RunResult execute_run(const RunConfig& config, const std::filesystem::path& out_dir);

int cmd_run(const GlobalOptions& options, std::ostream& log);

int cmd_stationary(const GlobalOptions& options, std::optional<double> tol, std::ostream& log);

/// Writes verify_<suite>.json; exit 0 iff every non-informational report passes.
int cmd_verify(const std::string& suite, const GlobalOptions& options, std::ostream& log);

struct SweepOptions {
  std::vector<double> dts;
  std::vector<double> ps;
  std::vector<double> mus;
};

int cmd_sweep(const GlobalOptions& options, const SweepOptions& sweep, std::ostream& log);

struct SpectrumOptions {
  std::size_t count = 10;
  std::vector<std::string> lengths;
  std::vector<std::size_t> sizes;
};

struct SpectrumRow {
  std::vector<std::size_t> mode;
  double discrete = 0.0;
  double continuum = 0.0;
};

/// The m lowest eigenvalues of the discrete operator with their continuum
/// counterparts sum_i (k_i pi / L_i)^2, ascending by discrete value.
std::vector<SpectrumRow> lowest_eigenvalues(const Domain& domain, std::size_t m);

int cmd_spectrum(const GlobalOptions& options, const SpectrumOptions& spectrum, std::ostream& log);

/// Entry point shared by the executable and tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sphereflow::cli
