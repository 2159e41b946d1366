#include "pots/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pots/engine.hpp"
#include "pots/errors.hpp"

namespace pots {

namespace {

double mean_of(std::span<const double> values) {
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

struct CentralMoments {
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
};

CentralMoments central_moments(std::span<const double> values, const char* what) {
  if (values.size() < 2) {
    throw DomainError(std::string(what) + ": needs at least two values");
  }
  const double mean = mean_of(values);
  CentralMoments m;
  for (double v : values) {
    const double d = v - mean;
    const double d2 = d * d;
    m.m2 += d2;
    m.m3 += d2 * d;
    m.m4 += d2 * d2;
  }
  const auto n = static_cast<double>(values.size());
  m.m2 /= n;
  m.m3 /= n;
  m.m4 /= n;
  if (!(m.m2 > 0.0)) {
    throw DomainError(std::string(what) + ": undefined for zero variance");
  }
  return m;
}

template <typename T, typename Fold>
T mean_fieldwise(std::span<const T> items, Fold fold) {
  if (items.empty()) {
    throw UsageError("aggregate_stats_over_runs: empty sequence");
  }
  T sum{};
  for (const T& item : items) fold(sum, item, 1.0);
  T out{};
  fold(out, sum, static_cast<double>(items.size()));
  return out;
}

}  // namespace

void RankingHistogram::add(std::size_t rank) {
  if (rank == 0) throw UsageError("RankingHistogram: ranks are 1-based");
  if (rank <= kTrackedRanks) {
    ++by_rank[rank - 1];
  } else {
    ++eleven_or_lower;
  }
}

std::uint64_t RankingHistogram::count(std::size_t rank) const {
  if (rank == 0) throw UsageError("RankingHistogram: ranks are 1-based");
  return rank <= kTrackedRanks ? by_rank[rank - 1] : eleven_or_lower;
}

std::uint64_t RankingHistogram::total() const noexcept {
  return std::accumulate(by_rank.begin(), by_rank.end(), eleven_or_lower);
}

double percentile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("percentile: empty sample");
  const double index = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lower = static_cast<std::size_t>(std::floor(index));
  const std::size_t upper = std::min(lower + 1, sorted.size() - 1);
  const double frac = index - static_cast<double>(lower);
  return sorted[lower] + frac * (sorted[upper] - sorted[lower]);
}

DistStats distribution_stats(std::span<const double> values) {
  if (values.empty()) throw DomainError("distribution_stats: empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  DistStats stats;
  stats.mean = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - stats.mean) * (v - stats.mean);
  stats.std_dev = std::sqrt(ss / static_cast<double>(values.size()));
  stats.min = sorted.front();
  stats.p25 = percentile_sorted(sorted, 25.0);
  stats.median = percentile_sorted(sorted, 50.0);
  stats.p75 = percentile_sorted(sorted, 75.0);
  stats.max = sorted.back();
  return stats;
}

double skewness(std::span<const double> values) {
  const CentralMoments m = central_moments(values, "skewness");
  return m.m3 / std::pow(m.m2, 1.5);
}

double excess_kurtosis(std::span<const double> values) {
  const CentralMoments m = central_moments(values, "excess_kurtosis");
  return m.m4 / (m.m2 * m.m2) - 3.0;
}

ShapeStats shape_stats(std::span<const double> values) {
  const CentralMoments m = central_moments(values, "shape_stats");
  return {m.m3 / std::pow(m.m2, 1.5), m.m4 / (m.m2 * m.m2) - 3.0};
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw UsageError("pearson_correlation: length mismatch (" + std::to_string(x.size()) +
                     " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw UsageError("pearson_correlation: needs at least two pairs");
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw DomainError("pearson_correlation: undefined for zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::size_t competition_rank(std::span<const double> rewards, ParticipantId participant) {
  if (participant >= rewards.size()) {
    throw UsageError("competition_rank: participant " + std::to_string(participant) +
                     " out of range for " + std::to_string(rewards.size()) + " participants");
  }
  const double own = rewards[participant];
  return 1 + static_cast<std::size_t>(
                 std::count_if(rewards.begin(), rewards.end(), [own](double r) { return r > own; }));
}

std::vector<std::size_t> competition_ranks(std::span<const double> rewards) {
  std::vector<std::size_t> order(rewards.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rewards[a] > rewards[b]; });
  std::vector<std::size_t> ranks(rewards.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const bool tied = pos > 0 && rewards[order[pos]] == rewards[order[pos - 1]];
    ranks[order[pos]] = tied ? ranks[order[pos - 1]] : pos + 1;
  }
  return ranks;
}

RankingHistogram ranking_histogram(std::span<const RunResult> runs, ParticipantId participant) {
  if (runs.empty()) throw UsageError("ranking_histogram: no runs");
  RankingHistogram histogram;
  for (const RunResult& run : runs) {
    histogram.add(competition_rank(run.cumulative_reward, participant));
  }
  return histogram;
}

DistStats aggregate_stats_over_runs(std::span<const DistStats> per_run) {
  return mean_fieldwise(per_run, [](DistStats& acc, const DistStats& s, double divisor) {
    acc.mean += s.mean / divisor;
    acc.std_dev += s.std_dev / divisor;
    acc.min += s.min / divisor;
    acc.p25 += s.p25 / divisor;
    acc.median += s.median / divisor;
    acc.p75 += s.p75 / divisor;
    acc.max += s.max / divisor;
  });
}

ShapeStats aggregate_stats_over_runs(std::span<const ShapeStats> per_run) {
  return mean_fieldwise(per_run, [](ShapeStats& acc, const ShapeStats& s, double divisor) {
    acc.skewness += s.skewness / divisor;
    acc.excess_kurtosis += s.excess_kurtosis / divisor;
  });
}

double aggregate_stats_over_runs(std::span<const double> per_run) {
  return mean_fieldwise(per_run, [](double& acc, double v, double divisor) { acc += v / divisor; });
}

}  // namespace pots
