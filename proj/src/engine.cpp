#include "pots/engine.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "pots/errors.hpp"

namespace pots {

TeamAssignment::TeamAssignment(std::vector<ParticipantId> members, std::size_t team_size)
    : members_(std::move(members)), team_size_(team_size) {
  require_divisible(members_.size(), team_size_);
}

bool TeamAssignment::is_partition() const {
  std::vector<ParticipantId> sorted(members_);
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != i) return false;
  }
  return true;
}

PerformanceProfile draw_performance_profile(const ScenarioConfig& config, RandomStream& stream) {
  PerformanceProfile profile;
  profile.factors.resize(config.participant_count);
  for (auto& factor : profile.factors) {
    factor = stream.uniform(config.perf_range.lo, config.perf_range.hi);
  }
  if (config.high_perf_override) {
    profile.factors.at(config.high_perf_override->id) = config.high_perf_override->factor;
  }
  return profile;
}

TeamAssignment form_teams(std::size_t participant_count, std::size_t team_size,
                          RandomStream& stream) {
  require_divisible(participant_count, team_size);
  std::vector<ParticipantId> ids(participant_count);
  std::iota(ids.begin(), ids.end(), ParticipantId{0});
  for (std::size_t i = participant_count; i > 1; --i) {
    const auto j = static_cast<std::size_t>(stream.below(i));
    std::swap(ids[i - 1], ids[j]);
  }
  return TeamAssignment(std::move(ids), team_size);
}

double simulated_time(double work_time, double multiplier, double performance_factor) {
  if (!(performance_factor > 0.0)) {
    throw DomainError("simulated_time: performance factor must be positive, got " +
                      std::to_string(performance_factor));
  }
  return work_time * multiplier / performance_factor;
}

RoundOutcome evaluate_round(const PerformanceProfile& profile, const ScenarioConfig& config,
                            TeamAssignment teams, std::span<const double> multipliers) {
  const std::size_t n = config.participant_count;
  if (profile.size() != n || multipliers.size() != n || teams.participant_count() != n) {
    throw UsageError("evaluate_round: profile, multipliers and teams must cover " +
                     std::to_string(n) + " participants");
  }
  if (teams.team_size() != config.team_size) {
    throw UsageError("evaluate_round: team assignment size does not match config.team_size");
  }

  const double work_time = member_work_time(config.base_time, config.team_size);
  RoundOutcome outcome{std::move(teams), {}, 0, std::vector<double>(n), std::vector<double>(n, 0.0)};
  for (std::size_t id = 0; id < n; ++id) {
    outcome.member_times[id] = simulated_time(work_time, multipliers[id], profile.factors[id]);
  }

  const std::size_t team_count = outcome.teams.team_count();
  outcome.team_times.resize(team_count);
  for (std::size_t t = 0; t < team_count; ++t) {
    double total = 0.0;
    for (ParticipantId id : outcome.teams.team(t)) total += outcome.member_times[id];
    outcome.team_times[t] = total;
  }
  // min_element keeps the first minimum, i.e. the lowest team index on ties.
  outcome.winner = static_cast<std::size_t>(
      std::min_element(outcome.team_times.begin(), outcome.team_times.end()) -
      outcome.team_times.begin());

  const double share = config.reward_per_round / static_cast<double>(config.team_size);
  for (ParticipantId id : outcome.teams.team(outcome.winner)) outcome.reward_delta[id] = share;
  return outcome;
}

RoundOutcome execute_round(const PerformanceProfile& profile, const ScenarioConfig& config,
                           RandomStream& stream) {
  TeamAssignment teams = form_teams(config.participant_count, config.team_size, stream);
  std::vector<double> multipliers(config.participant_count);
  for (auto& m : multipliers) {
    m = stream.uniform(config.multiplier_range.lo, config.multiplier_range.hi);
  }
  return evaluate_round(profile, config, std::move(teams), multipliers);
}

RunResult run_simulation(const ScenarioConfig& config, std::uint64_t run_seed) {
  config.validate();
  const std::size_t n = config.participant_count;

  RandomStream stream(run_seed);
  RunResult result;
  if (config.redraw_profile_per_run) {
    result.profile = draw_performance_profile(config, stream);
  } else {
    RandomStream profile_stream(splitmix64_mix(config.master_seed));
    result.profile = draw_performance_profile(config, profile_stream);
  }
  result.cumulative_reward.assign(n, 0.0);
  result.win_count.assign(n, 0);
  result.active_time.assign(n, 0.0);

  const double share = config.reward_per_round / static_cast<double>(config.team_size);
  for (std::size_t round = 0; round < config.rounds; ++round) {
    const RoundOutcome outcome = execute_round(result.profile, config, stream);
    for (std::size_t id = 0; id < n; ++id) {
      result.active_time[id] += outcome.member_times[id];
      result.total_active_time += outcome.member_times[id];
    }
    for (ParticipantId id : outcome.teams.team(outcome.winner)) ++result.win_count[id];
  }
  // Rebuild rewards from win counts so reward == share * wins holds exactly.
  for (std::size_t id = 0; id < n; ++id) {
    result.cumulative_reward[id] = share * static_cast<double>(result.win_count[id]);
  }
  return result;
}

}  // namespace pots
