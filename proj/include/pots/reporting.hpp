#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pots/engine.hpp"
#include "pots/experiments.hpp"

namespace pots {

inline constexpr const char* kToolVersion = "pots-sim 1.0.0";

inline constexpr const char* kParticipantCsvHeader =
    "run_id,participant_id,performance_factor,reward,wins,active_time_seconds,rank";

/// Six significant digits, printf %g style.
std::string format_float(double value);

/// Writes the header plus one row per participant. Returns the number of
/// data rows. Throws IoError if the sink fails; rows already written stay.
std::size_t write_participant_csv(const RunResult& run, std::size_t run_id, std::ostream& out,
                                  bool with_header = true);

struct ParticipantRecord {
  std::size_t run_id = 0;
  ParticipantId participant_id = 0;
  double performance_factor = 0.0;
  double reward = 0.0;
  std::uint64_t wins = 0;
  double active_time_seconds = 0.0;
  std::size_t rank = 0;
};

std::vector<ParticipantRecord> read_participant_csv(std::istream& in);

enum class TableId { rewards, ranking, energy, shape, correlation };

std::string to_string(TableId table);
TableId parse_table_id(const std::string& text);
inline constexpr TableId kAllTables[] = {TableId::rewards, TableId::ranking, TableId::energy,
                                         TableId::shape, TableId::correlation};

/// A published value a computed cell is compared against. Without a
/// tolerance the comparison is informational only.
struct ReferenceValue {
  double value = 0.0;
  std::optional<double> tolerance;
  bool relative = false;

  [[nodiscard]] bool within(double computed) const;
};

/// Reference for one cell, keyed by table, row (team size and condition)
/// and column name.
std::optional<ReferenceValue> reference_value(TableId table, std::size_t team_size,
                                              Condition condition, const std::string& column);

/// Table document: one row per matching summary, scenario label first, then
/// the table's statistic columns, with reference values attached per row.
/// The ranking table needs at least one high_perf summary (UsageError
/// otherwise) and only lists those.
nlohmann::json emit_table(std::span<const ScenarioSummary> summaries, TableId table);

/// Computed-vs-reference comparison over every table the summaries cover.
/// Cells with a tolerance carry "flagged": true when outside it.
nlohmann::json delta_report(std::span<const ScenarioSummary> summaries);

struct HistogramBin {
  double lower_edge = 0.0;
  std::size_t count = 0;
  friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

/// Left-closed, right-open bins of bin_width starting at 0, up to the bin
/// holding the maximum. UsageError for a non-positive width or negative value.
std::vector<HistogramBin> emit_reward_histogram(std::span<const double> rewards, double bin_width);
std::vector<HistogramBin> emit_reward_histogram(const RunResult& run, double bin_width);

nlohmann::json to_json(const ScenarioConfig& config);
/// Flat config document: keys are ScenarioConfig field names, ranges are
/// [lo, hi] arrays, the override is split into high_perf_id and
/// high_perf_factor (null clears it). Unknown keys are a ConfigError.
ScenarioConfig config_from_json(const nlohmann::json& doc);
/// Overlays the keys present in doc onto base.
ScenarioConfig apply_config_json(ScenarioConfig base, const nlohmann::json& doc);
nlohmann::json to_json(const ScenarioSummary& summary);
ScenarioSummary summary_from_json(const nlohmann::json& doc);

struct ReportBundle {
  std::vector<ScenarioSummary> summaries;
  std::string tool_version = kToolVersion;
  std::optional<std::string> emitted_at;  // omitted by default so reruns are byte-identical
  std::optional<std::uint64_t> sweep_seed;
};

void write_report_bundle(const ReportBundle& bundle, std::ostream& out);
ReportBundle read_report_bundle(std::istream& in);

}  // namespace pots
