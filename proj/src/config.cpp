#include "pots/config.hpp"

#include <cmath>
#include <string>

#include "pots/errors.hpp"

namespace pots {

namespace {

void require_interval(const Interval& range, const char* field) {
  if (!std::isfinite(range.lo) || !std::isfinite(range.hi)) {
    throw ConfigError(std::string(field) + ": bounds must be finite");
  }
  if (range.lo > range.hi) {
    throw ConfigError(std::string(field) + ": empty interval (lo > hi)");
  }
  if (range.lo <= 0.0) {
    throw ConfigError(std::string(field) + ": lower bound must be positive");
  }
}

}  // namespace

void require_divisible(std::size_t participant_count, std::size_t team_size) {
  if (team_size == 0 || participant_count % team_size != 0) {
    throw ConfigError("population not divisible by team size (participant_count=" +
                      std::to_string(participant_count) +
                      ", team_size=" + std::to_string(team_size) + ")");
  }
}

void ScenarioConfig::validate() const {
  if (participant_count == 0) {
    throw ConfigError("participant_count: must be positive");
  }
  if (team_size == 0) {
    throw ConfigError("team_size: must be positive");
  }
  if (team_size > participant_count) {
    throw ConfigError("team_size: exceeds participant_count (" + std::to_string(team_size) +
                      " > " + std::to_string(participant_count) + ")");
  }
  require_divisible(participant_count, team_size);
  if (!(base_time > 0.0) || !std::isfinite(base_time)) {
    throw ConfigError("base_time: must be positive");
  }
  if (!(reward_per_round > 0.0) || !std::isfinite(reward_per_round)) {
    throw ConfigError("reward_per_round: must be positive");
  }
  require_interval(perf_range, "perf_range");
  require_interval(multiplier_range, "multiplier_range");
  if (high_perf_override) {
    if (high_perf_override->id >= participant_count) {
      throw ConfigError("high_perf_override.id: " + std::to_string(high_perf_override->id) +
                        " out of range for participant_count " +
                        std::to_string(participant_count));
    }
    if (!(high_perf_override->factor > 0.0) || !std::isfinite(high_perf_override->factor)) {
      throw ConfigError("high_perf_override.factor: must be positive");
    }
  }
}

ScenarioConfig paper_defaults() {
  ScenarioConfig config;
  config.high_perf_override = HighPerfOverride{1000, 2.5};
  return config;
}

ScenarioConfig ci_scale(ScenarioConfig base) {
  base.participant_count = 160;
  base.rounds = 160;
  base.runs = 20;
  if (base.high_perf_override && base.high_perf_override->id >= base.participant_count) {
    base.high_perf_override->id = 100;
  }
  return base;
}

}  // namespace pots
