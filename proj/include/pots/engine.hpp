#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pots/config.hpp"
#include "pots/random.hpp"

namespace pots {

/// Per-participant performance factors for one run, indexed by id.
struct PerformanceProfile {
  std::vector<double> factors;

  [[nodiscard]] std::size_t size() const noexcept { return factors.size(); }
  friend bool operator==(const PerformanceProfile&, const PerformanceProfile&) = default;
};

/// Partition of the population into equally sized teams. Members are stored
/// contiguously; team t occupies [t * team_size, (t + 1) * team_size).
class TeamAssignment {
 public:
  TeamAssignment(std::vector<ParticipantId> members, std::size_t team_size);

  [[nodiscard]] std::size_t team_size() const noexcept { return team_size_; }
  [[nodiscard]] std::size_t team_count() const noexcept { return members_.size() / team_size_; }
  [[nodiscard]] std::size_t participant_count() const noexcept { return members_.size(); }

  [[nodiscard]] std::span<const ParticipantId> team(std::size_t index) const {
    return std::span(members_).subspan(index * team_size_, team_size_);
  }
  [[nodiscard]] std::span<const ParticipantId> members() const noexcept { return members_; }

  /// True when the members are exactly a permutation of 0..n-1.
  [[nodiscard]] bool is_partition() const;

 private:
  std::vector<ParticipantId> members_;
  std::size_t team_size_;
};

struct RoundOutcome {
  TeamAssignment teams;
  std::vector<double> team_times;    // seconds, one per team
  std::size_t winner = 0;
  std::vector<double> member_times;  // seconds, one per participant
  std::vector<double> reward_delta;  // one per participant
};

struct RunResult {
  std::vector<double> cumulative_reward;
  std::vector<std::uint64_t> win_count;
  std::vector<double> active_time;  // seconds per participant, summed over rounds
  double total_active_time = 0.0;
  PerformanceProfile profile;

  [[nodiscard]] std::size_t participant_count() const noexcept { return cumulative_reward.size(); }
  friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// Draws each factor uniformly on perf_range, then applies the override.
PerformanceProfile draw_performance_profile(const ScenarioConfig& config, RandomStream& stream);

/// Fisher-Yates shuffle of 0..n-1 cut into consecutive chunks of team_size.
TeamAssignment form_teams(std::size_t participant_count, std::size_t team_size,
                          RandomStream& stream);

/// Nominal share of a team's base time for one member.
constexpr double member_work_time(double base_time, std::size_t team_size) noexcept {
  return base_time / static_cast<double>(team_size);
}

/// work_time * multiplier / performance_factor. Throws DomainError on a
/// non-positive performance factor.
double simulated_time(double work_time, double multiplier, double performance_factor);

/// Scores a round with the teams and per-participant multipliers fixed.
/// The team with the smallest sequential completion time wins; ties go to
/// the lowest team index.
RoundOutcome evaluate_round(const PerformanceProfile& profile, const ScenarioConfig& config,
                            TeamAssignment teams, std::span<const double> multipliers);

/// Stream order: one team shuffle, then one multiplier per participant in id
/// order.
RoundOutcome execute_round(const PerformanceProfile& profile, const ScenarioConfig& config,
                           RandomStream& stream);

/// One full run. The stream seeded from run_seed feeds the profile draw
/// first, then every round in order. With redraw_profile_per_run == false
/// the profile is drawn from a stream seeded by the config's master seed
/// instead, so every run of the scenario shares it.
RunResult run_simulation(const ScenarioConfig& config, std::uint64_t run_seed);

}  // namespace pots
