#pragma once

#include <optional>
#include <string>

#include "rtqw/config.hpp"

namespace rtqw {

struct CliOptions {
  std::optional<int> n;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;  // v-grid points per axis for the command's torus sampling
  std::string out = ".";
  bool enumerate = false;
  std::string which = "md";  // rates: md or ld
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitAssumption = 3;
inline constexpr int kExitConvergence = 4;

struct CommandResult {
  int exit_code = kExitOk;
  nlohmann::json record;
  std::vector<std::string> files;
};

// Each command writes <command>.json plus CSV tables into opts.out.
CommandResult cmd_simulate(const ModelConfig& cfg, const CliOptions& opts);
CommandResult cmd_spectral(const ModelConfig& cfg, const CliOptions& opts);
CommandResult cmd_rates(const ModelConfig& cfg, const CliOptions& opts);
CommandResult cmd_mc(const ModelConfig& cfg, const CliOptions& opts);

// Loads the config, runs the command and maps failures to exit codes,
// printing messages to `err`.
int run_command(const std::string& command, const std::string& config_path, const CliOptions& opts,
                std::ostream& err);

}  // namespace rtqw
