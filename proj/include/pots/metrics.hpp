#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pots/config.hpp"

namespace pots {

struct RunResult;

/// Distribution summary. Population standard deviation; percentiles by
/// linear interpolation at fractional index p/100 * (n - 1) of the sorted
/// sample.
struct DistStats {
  double mean = 0.0;
  double std_dev = 0.0;
  double min = 0.0;
  double p25 = 0.0;
  double median = 0.0;
  double p75 = 0.0;
  double max = 0.0;
  friend bool operator==(const DistStats&, const DistStats&) = default;
};

struct ShapeStats {
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  friend bool operator==(const ShapeStats&, const ShapeStats&) = default;
};

/// Run counts per competition rank 1..10, plus everything at rank 11 or lower.
struct RankingHistogram {
  static constexpr std::size_t kTrackedRanks = 10;

  std::array<std::uint64_t, kTrackedRanks> by_rank{};  // by_rank[r - 1] = runs at rank r
  std::uint64_t eleven_or_lower = 0;

  void add(std::size_t rank);
  [[nodiscard]] std::uint64_t count(std::size_t rank) const;
  [[nodiscard]] std::uint64_t total() const noexcept;
  friend bool operator==(const RankingHistogram&, const RankingHistogram&) = default;
};

DistStats distribution_stats(std::span<const double> values);

/// Percentile p in [0, 100] of an already sorted, nonempty sample.
double percentile_sorted(std::span<const double> sorted, double p);

/// Fisher-Pearson g1 = m3 / m2^1.5. DomainError when the variance is zero.
double skewness(std::span<const double> values);

/// g2 = m4 / m2^2 - 3. DomainError when the variance is zero.
double excess_kurtosis(std::span<const double> values);

ShapeStats shape_stats(std::span<const double> values);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

/// 1 + number of participants with a strictly greater reward.
std::size_t competition_rank(std::span<const double> rewards, ParticipantId participant);

/// Competition ranks for every participant at once, O(n log n).
std::vector<std::size_t> competition_ranks(std::span<const double> rewards);

RankingHistogram ranking_histogram(std::span<const RunResult> runs, ParticipantId participant);

/// Field-wise arithmetic mean across runs. UsageError on an empty sequence.
DistStats aggregate_stats_over_runs(std::span<const DistStats> per_run);
ShapeStats aggregate_stats_over_runs(std::span<const ShapeStats> per_run);
double aggregate_stats_over_runs(std::span<const double> per_run);

}  // namespace pots
