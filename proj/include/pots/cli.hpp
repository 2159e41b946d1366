#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pots/config.hpp"
#include "pots/experiments.hpp"
#include "pots/reporting.hpp"

namespace pots::cli {

enum class Subcommand { run, sweep, report };

/// Environment variable consulted when --out is not given.
inline constexpr const char* kOutDirEnv = "POTS_OUT_DIR";
inline constexpr const char* kDefaultOutDir = "pots_out";

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kRuntimeError = 2 };

struct CliInvocation {
  Subcommand subcommand = Subcommand::run;
  std::optional<std::filesystem::path> config_path;
  ScenarioConfig config;  // effective config after presets, file and flags
  std::vector<std::size_t> team_sizes;
  std::vector<Condition> conditions;
  std::size_t threads = 1;
  std::filesystem::path out_dir;
  bool raw_csv = false;
  bool timestamp = false;
  std::optional<std::filesystem::path> input;  // report: summary document
  std::vector<TableId> tables;                 // report: empty means all
  bool help_requested = false;
  std::string help_text;
};

/// Parses arguments (without the program name). Layering order: defaults,
/// --paper-defaults, --ci-scale, --config file, individual flags. Throws
/// UsageError or ConfigError naming the offending flag or field.
CliInvocation parse_and_validate(const std::vector<std::string>& arguments);

/// Executes a validated invocation. Returns an ExitCode.
int execute(const CliInvocation& invocation, std::ostream& out, std::ostream& err);

/// parse_and_validate + execute with error-to-exit-code mapping.
int run_cli(const std::vector<std::string>& arguments, std::ostream& out, std::ostream& err);

}  // namespace pots::cli
