#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bchlab/params.hpp"

namespace bchlab::cli {

// Anything wrong with the user's configuration. Maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string subcommand;
  WaveParams params{1.0, 2.0, 0.4};
  // Unset grid settings take the subcommand's default.
  std::optional<std::size_t> n;
  std::optional<double> domain_length;
  std::optional<double> dt;
  std::optional<double> t_final;
  std::optional<std::filesystem::path> out;
  unsigned jobs = 1;
  std::uint64_t seed = 12345;
  bool fast = false;

  // criterion
  bool sweep = false;
  std::size_t sweep_points = 19;
  // portrait; empty means the default levels
  std::vector<double> energies;
  // spectrum
  std::string multiplier = "relative";     // relative | wave
  std::string discretization = "spectral"; // fd2 | fd4 | spectral
  std::string closure = "auto";            // auto | dirichlet | periodic
  // evolve
  double eps = 0.0;
  double record_every = 0.1;
  double snapshot_every = 0.0;
  // verify-all; empty runs every criterion
  std::vector<int> criteria;

  std::map<std::string, double> tolerances;
};

/// Sets the fields named by the keys of a JSON object. Unknown keys and
/// values of the wrong type throw ConfigError.
void apply_json(RunConfig& cfg, const nlohmann::json& j);

/// Reads and applies a JSON config file.
void apply_json_file(RunConfig& cfg, const std::filesystem::path& path);

/// Throws ConfigError naming the first problem (including inadmissible
/// wave parameters and b != 1 where only b = 1 is supported).
void validate(const RunConfig& cfg);

/// --out, else the config file's "out", else $BCHLAB_OUT, else ./bchlab_out.
[[nodiscard]] std::filesystem::path output_dir(const RunConfig& cfg);

/// Named tolerance with the built-in default unless overridden in the config.
[[nodiscard]] double tolerance(const RunConfig& cfg, const std::string& name, double fallback);

[[nodiscard]] nlohmann::ordered_json to_json(const RunConfig& cfg);

}  // namespace bchlab::cli
