#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

namespace pots {

using ParticipantId = std::size_t;

/// Closed real interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] constexpr bool contains(double v) const noexcept { return lo <= v && v <= hi; }
  [[nodiscard]] constexpr double midpoint() const noexcept { return 0.5 * (lo + hi); }
  friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

/// A single participant whose performance factor is pinned after drawing.
struct HighPerfOverride {
  ParticipantId id = 0;
  double factor = 1.0;
  friend constexpr bool operator==(const HighPerfOverride&, const HighPerfOverride&) = default;
};

/// Full parameterization of one experiment condition.
///
/// Default-constructed values are the reference simulation settings without
/// the high-performance node; `paper_defaults()` adds it.
struct ScenarioConfig {
  std::size_t participant_count = 1600;
  std::size_t team_size = 1;
  std::size_t rounds = 1600;
  std::size_t runs = 100;
  double base_time = 600.0;
  double reward_per_round = 10.0;
  Interval perf_range{0.8, 1.5};
  Interval multiplier_range{0.8, 1.2};
  std::optional<HighPerfOverride> high_perf_override;
  std::uint64_t master_seed = kDefaultSeed;
  bool redraw_profile_per_run = true;

  static constexpr std::uint64_t kDefaultSeed = 20240601;

  [[nodiscard]] std::size_t team_count() const noexcept { return participant_count / team_size; }

  /// Throws ConfigError naming the first offending field.
  void validate() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// n=1600, 1600 rounds, 100 runs, 600 s, reward 10, perf [0.8,1.5],
/// multiplier [0.8,1.2], node 1000 pinned to 2.5.
ScenarioConfig paper_defaults();

/// Reduced population for fast invariant checks (160 participants, 160
/// rounds, 20 runs). Does not reproduce reference magnitudes. The
/// high-performance node, when present, is remapped to id 100.
ScenarioConfig ci_scale(ScenarioConfig base);

/// Throws ConfigError("population not divisible by team size ...") when
/// team_size is zero or does not divide participant_count.
void require_divisible(std::size_t participant_count, std::size_t team_size);

}  // namespace pots
