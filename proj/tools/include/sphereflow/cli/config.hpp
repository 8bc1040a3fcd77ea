#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sphereflow/domain.hpp"
#include "sphereflow/errors.hpp"
#include "sphereflow/flow.hpp"
#include "sphereflow/random_fields.hpp"

namespace sphereflow::cli {

/// Malformed configuration text; carries the offending line and key.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& source, std::size_t line, const std::string& key,
              const std::string& what);

  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

/// Well-formed configuration that violates a constraint.
class ValidationError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class IoError : public Error {
 public:
  using Error::Error;
};

struct DomainSpec {
  int dim = 1;
  std::vector<double> lengths;
  std::vector<std::size_t> sizes;

  Domain build() const;
};

enum class InitialKind { modes, random, snapshot };

struct ModeTerm {
  std::vector<std::size_t> index;
  double coefficient = 1.0;
};

struct InitialSpec {
  InitialKind kind = InitialKind::modes;
  std::vector<ModeTerm> modes;
  FieldPopulation population = FieldPopulation::low_pass;
  std::filesystem::path snapshot;
  /// L2 norm the initial field is rescaled to.
  double norm = 1.0;
};

enum class CutoffLambda { discrete, continuum, explicit_value };

struct OutputSpec {
  bool snapshots = true;
  bool plotdata = true;
};

struct RunConfig {
  DomainSpec domain;
  FlowConfig flow;
  InitialSpec initial;
  CutoffLambda cutoff_lambda = CutoffLambda::discrete;
  double stationary_tol = 1e-8;
  OutputSpec output;
  /// Text the configuration was read from; hashed into the manifest.
  std::string source_text;
  std::string source_name;
};

/// Parses an INI document with sections [domain], [flow], [cutoff], [yosida]
/// and [output]. Unknown sections and keys are errors.
RunConfig parse_config_text(std::string_view text, const std::string& source_name = "<config>");
RunConfig parse_config(const std::filesystem::path& path);

/// Throws ValidationError naming the violated constraint.
void validate(const RunConfig& config);

/// Number, "pi", "2pi", "2*pi", "pi/2", "3*pi/4".
double parse_length(std::string_view text);

std::string to_string(const InitialSpec& initial);

}  // namespace sphereflow::cli
