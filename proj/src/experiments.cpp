#include "pots/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "pots/errors.hpp"

namespace pots {

std::string to_string(Condition condition) {
  return condition == Condition::homogeneous ? "homogeneous" : "high_perf";
}

Condition parse_condition(const std::string& text) {
  if (text == "homogeneous") return Condition::homogeneous;
  if (text == "high_perf") return Condition::high_perf;
  throw UsageError("unknown condition '" + text + "' (expected homogeneous or high_perf)");
}

std::string scenario_label(std::size_t team_size) {
  return team_size == 1 ? "PoW" : "PoTS (" + std::to_string(team_size) + ")";
}

void SweepSpec::validate() const {
  if (team_sizes.empty()) throw ConfigError("team_sizes: empty sweep");
  if (conditions.empty()) throw ConfigError("conditions: empty sweep");
  for (std::size_t n : team_sizes) require_divisible(base_config.participant_count, n);
  const bool wants_high_perf =
      std::find(conditions.begin(), conditions.end(), Condition::high_perf) != conditions.end();
  if (wants_high_perf && !base_config.high_perf_override) {
    throw ConfigError("conditions: high_perf requested but no high_perf_override configured");
  }
  for (std::size_t n : team_sizes) {
    for (Condition c : conditions) sweep_cell_config(*this, n, c).validate();
  }
}

std::uint64_t derive_scenario_seed(std::uint64_t sweep_seed, std::size_t team_size,
                                   Condition condition) noexcept {
  const std::uint64_t cell = 2 * static_cast<std::uint64_t>(team_size) +
                             (condition == Condition::high_perf ? 1 : 0);
  return splitmix64_mix(derive_run_seed(sweep_seed, cell));
}

std::vector<RunResult> execute_runs(const ScenarioConfig& config, const ExecutionOptions& options) {
  config.validate();
  std::vector<RunResult> results(config.runs);
  const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, std::max<std::size_t>(config.runs, 1));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t run = next++; run < config.runs; run = next++) {
      try {
        results[run] = run_simulation(config, derive_run_seed(config.master_seed, run));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

ScenarioSummary summarize_runs(const ScenarioConfig& config, std::span<const RunResult> runs) {
  ScenarioSummary summary;
  summary.config_echo = config;
  if (runs.empty()) return summary;

  std::vector<DistStats> dist;
  std::vector<ShapeStats> shape;
  std::vector<double> correlation;
  std::vector<double> energy;
  dist.reserve(runs.size());
  for (const RunResult& run : runs) {
    dist.push_back(distribution_stats(run.cumulative_reward));
    energy.push_back(run.total_active_time);
    if (dist.back().std_dev > 0.0) {
      shape.push_back(shape_stats(run.cumulative_reward));
      try {
        correlation.push_back(pearson_correlation(run.cumulative_reward, run.profile.factors));
      } catch (const DomainError&) {
        // constant profile: correlation undefined for this run
      }
    }
  }
  summary.reward_stats = aggregate_stats_over_runs(std::span<const DistStats>(dist));
  summary.total_active_time_mean = aggregate_stats_over_runs(std::span<const double>(energy));
  if (!shape.empty()) summary.shape_stats = aggregate_stats_over_runs(std::span<const ShapeStats>(shape));
  if (!correlation.empty()) {
    summary.correlation = aggregate_stats_over_runs(std::span<const double>(correlation));
  }
  if (config.high_perf_override) {
    summary.ranking = ranking_histogram(runs, config.high_perf_override->id);
  }
  return summary;
}

ScenarioSummary execute_scenario(const ScenarioConfig& config, const ExecutionOptions& options) {
  const std::vector<RunResult> runs = execute_runs(config, options);
  return summarize_runs(config, runs);
}

ScenarioConfig sweep_cell_config(const SweepSpec& spec, std::size_t team_size, Condition condition) {
  ScenarioConfig config = spec.base_config;
  config.team_size = team_size;
  if (condition == Condition::homogeneous) config.high_perf_override.reset();
  config.master_seed = derive_scenario_seed(spec.base_config.master_seed, team_size, condition);
  return config;
}

std::vector<ScenarioSummary> sweep_team_sizes(const SweepSpec& spec, const ExecutionOptions& options) {
  spec.validate();
  std::vector<ScenarioSummary> summaries;
  summaries.reserve(spec.team_sizes.size() * spec.conditions.size());
  for (Condition condition : spec.conditions) {
    for (std::size_t n : spec.team_sizes) {
      summaries.push_back(execute_scenario(sweep_cell_config(spec, n, condition), options));
    }
  }
  return summaries;
}

}  // namespace pots
