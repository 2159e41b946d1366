#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pots/config.hpp"
#include "pots/engine.hpp"
#include "pots/metrics.hpp"

namespace pots {

enum class Condition { homogeneous, high_perf };

std::string to_string(Condition condition);
/// Accepts "homogeneous" or "high_perf"; UsageError otherwise.
Condition parse_condition(const std::string& text);

/// "PoW" for team size 1, "PoTS (N)" otherwise.
std::string scenario_label(std::size_t team_size);

struct SweepSpec {
  ScenarioConfig base_config;
  std::vector<std::size_t> team_sizes{1, 2, 4, 8, 16, 32, 64};
  std::vector<Condition> conditions{Condition::homogeneous};

  /// Checks every team size against the population before anything runs.
  void validate() const;
};

struct ScenarioSummary {
  ScenarioConfig config_echo;
  DistStats reward_stats;
  std::optional<ShapeStats> shape_stats;  // absent when no run had reward variance
  std::optional<double> correlation;      // absent when no run had reward variance
  double total_active_time_mean = 0.0;
  std::optional<RankingHistogram> ranking;  // present with a high-performance node

  [[nodiscard]] Condition condition() const noexcept {
    return config_echo.high_perf_override ? Condition::high_perf : Condition::homogeneous;
  }
  [[nodiscard]] std::string label() const { return scenario_label(config_echo.team_size); }
  friend bool operator==(const ScenarioSummary&, const ScenarioSummary&) = default;
};

struct ExecutionOptions {
  std::size_t threads = 1;  // upper bound on concurrent runs; 0 means 1
};

/// SplitMix64 finalizer of master_seed + (run_index + 1) * golden increment,
/// i.e. the (run_index + 1)-th output of SplitMix64 seeded with master_seed.
constexpr std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t run_index) noexcept {
  return splitmix64_mix(master_seed + (run_index + 1) * kSplitMixIncrement);
}

/// Master seed for one (team size, condition) cell of a sweep.
std::uint64_t derive_scenario_seed(std::uint64_t sweep_seed, std::size_t team_size,
                                   Condition condition) noexcept;

/// All runs of a scenario, ordered by run index regardless of scheduling.
std::vector<RunResult> execute_runs(const ScenarioConfig& config, const ExecutionOptions& options = {});

/// Aggregates per-run statistics into a summary. Runs whose reward vector
/// has zero variance contribute to reward_stats and energy but not to
/// shape or correlation.
ScenarioSummary summarize_runs(const ScenarioConfig& config, std::span<const RunResult> runs);

ScenarioSummary execute_scenario(const ScenarioConfig& config, const ExecutionOptions& options = {});

/// The configuration actually executed for one sweep cell.
ScenarioConfig sweep_cell_config(const SweepSpec& spec, std::size_t team_size, Condition condition);

/// One summary per (condition, team size), conditions outermost, in spec order.
std::vector<ScenarioSummary> sweep_team_sizes(const SweepSpec& spec, const ExecutionOptions& options = {});

}  // namespace pots
