#include "pots/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "pots/errors.hpp"
#include "pots/metrics.hpp"

namespace pots {

using nlohmann::json;

std::string format_float(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::size_t write_participant_csv(const RunResult& run, std::size_t run_id, std::ostream& out,
                                  bool with_header) {
  const std::size_t n = run.participant_count();
  if (run.win_count.size() != n || run.active_time.size() != n || run.profile.size() != n) {
    throw UsageError("write_participant_csv: inconsistent run result");
  }
  const std::vector<std::size_t> ranks = competition_ranks(run.cumulative_reward);

  if (with_header) out << kParticipantCsvHeader << '\n';
  if (!out) throw IoError("write_participant_csv: sink failed before any row was written");
  std::size_t rows = 0;
  for (std::size_t id = 0; id < n; ++id) {
    out << run_id << ',' << id << ',' << format_float(run.profile.factors[id]) << ','
        << format_float(run.cumulative_reward[id]) << ',' << run.win_count[id] << ','
        << format_float(run.active_time[id]) << ',' << ranks[id] << '\n';
    if (!out) {
      throw IoError("write_participant_csv: sink failed after " + std::to_string(rows) +
                    " rows; output is partial");
    }
    ++rows;
  }
  return rows;
}

std::vector<ParticipantRecord> read_participant_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kParticipantCsvHeader) {
    throw UsageError("read_participant_csv: missing or unexpected header");
  }
  std::vector<ParticipantRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line == kParticipantCsvHeader) continue;  // concatenated per-run blocks
    std::istringstream row(line);
    ParticipantRecord r;
    char c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0, c6 = 0;
    row >> r.run_id >> c1 >> r.participant_id >> c2 >> r.performance_factor >> c3 >> r.reward >>
        c4 >> r.wins >> c5 >> r.active_time_seconds >> c6 >> r.rank;
    if (!row || c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || c5 != ',' || c6 != ',') {
      throw UsageError("read_participant_csv: malformed row at line " + std::to_string(line_no));
    }
    records.push_back(r);
  }
  return records;
}

std::string to_string(TableId table) {
  switch (table) {
    case TableId::rewards: return "rewards";
    case TableId::ranking: return "ranking";
    case TableId::energy: return "energy";
    case TableId::shape: return "shape";
    case TableId::correlation: return "correlation";
  }
  return "unknown";
}

TableId parse_table_id(const std::string& text) {
  for (TableId t : kAllTables) {
    if (to_string(t) == text) return t;
  }
  throw UsageError("unknown table '" + text +
                   "' (expected rewards, ranking, energy, shape or correlation)");
}

bool ReferenceValue::within(double computed) const {
  if (!tolerance) return true;
  const double allowed = relative ? *tolerance * std::abs(value) : *tolerance;
  return std::abs(computed - value) <= allowed;
}

namespace {

// Published table values for the reference population (n = 1600, 1600
// rounds, 100 runs). Reward, shape and correlation rows describe the
// homogeneous population; ranking rows describe the high-performance node.
constexpr std::size_t kReferenceTeamSizes[] = {1, 2, 4, 8, 16, 32, 64};

struct RewardRow { double mean, std_dev, min, p25, median, p75, max; };
constexpr RewardRow kRewardRows[] = {
    {10.00, 54.81, 0.00, 0.00, 0.00, 0.00, 592.80}, {10.00, 21.42, 0.00, 0.00, 0.00, 5.61, 130.30},
    {10.00, 13.06, 0.00, 0.00, 3.50, 16.69, 66.35}, {10.00, 8.63, 0.00, 2.50, 7.58, 16.22, 41.04},
    {10.00, 5.70, 0.04, 5.02, 9.38, 14.34, 28.19},  {10.00, 3.72, 1.84, 6.99, 9.94, 12.81, 21.09},
    {10.00, 2.38, 3.97, 8.15, 10.05, 11.78, 16.91},
};
constexpr double kEnergyRows[] = {1378.89, 689.91, 344.59, 172.43, 86.28, 43.10, 21.53};
constexpr double kSkewRows[] = {6.846, 2.529, 1.414, 0.792, 0.404, 0.167, 0.008};
constexpr double kKurtRows[] = {51.47, 6.19, 1.28, -0.22, -0.67, -0.72, -0.66};
constexpr double kCorrelationRows[] = {0.307, 0.663, 0.831, 0.892, 0.898, 0.882, 0.855};
constexpr std::uint64_t kRankingPow[] = {100, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
constexpr std::uint64_t kRankingPots[] = {54, 13, 4, 4, 3, 2, 2, 3, 2, 1, 12};

std::optional<std::size_t> reference_row(std::size_t team_size) {
  for (std::size_t i = 0; i < std::size(kReferenceTeamSizes); ++i) {
    if (kReferenceTeamSizes[i] == team_size) return i;
  }
  return std::nullopt;
}

ReferenceValue ref(double value) { return {value, std::nullopt, false}; }
ReferenceValue ref_abs(double value, double tol) { return {value, tol, false}; }
ReferenceValue ref_rel(double value, double tol) { return {value, tol, true}; }

std::vector<std::string> table_columns(TableId table) {
  switch (table) {
    case TableId::rewards: return {"mean", "std_dev", "min", "p25", "median", "p75", "max"};
    case TableId::ranking:
      return {"1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "11_or_lower"};
    case TableId::energy: return {"total_active_time_1e6_s"};
    case TableId::shape: return {"skewness", "excess_kurtosis"};
    case TableId::correlation: return {"correlation"};
  }
  return {};
}

std::optional<double> cell_value(const ScenarioSummary& s, TableId table, std::size_t column) {
  switch (table) {
    case TableId::rewards: {
      const DistStats& d = s.reward_stats;
      const double cells[] = {d.mean, d.std_dev, d.min, d.p25, d.median, d.p75, d.max};
      return cells[column];
    }
    case TableId::ranking:
      if (!s.ranking) return std::nullopt;
      return static_cast<double>(s.ranking->count(column + 1));
    case TableId::energy: return s.total_active_time_mean / 1e6;
    case TableId::shape:
      if (!s.shape_stats) return std::nullopt;
      return column == 0 ? s.shape_stats->skewness : s.shape_stats->excess_kurtosis;
    case TableId::correlation: return s.correlation;
  }
  return std::nullopt;
}

bool table_includes(TableId table, const ScenarioSummary& s) {
  return table != TableId::ranking || s.condition() == Condition::high_perf;
}

json value_or_null(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json reference_to_json(const ReferenceValue& r) {
  json doc{{"value", r.value}};
  if (r.tolerance) {
    doc["tolerance"] = *r.tolerance;
    doc["tolerance_kind"] = r.relative ? "relative" : "absolute";
  }
  return doc;
}

}  // namespace

std::optional<ReferenceValue> reference_value(TableId table, std::size_t team_size,
                                              Condition condition, const std::string& column) {
  const auto row = reference_row(team_size);
  if (!row) return std::nullopt;
  const std::size_t i = *row;
  const bool pow = team_size == 1;
  const bool homogeneous = condition == Condition::homogeneous;

  switch (table) {
    case TableId::rewards: {
      if (!homogeneous) return std::nullopt;
      const RewardRow& r = kRewardRows[i];
      if (column == "mean") return ref_rel(r.mean, 1e-6);
      if (column == "std_dev") return pow ? ref_rel(r.std_dev, 0.20) : ref(r.std_dev);
      if (column == "min") return ref(r.min);
      if (column == "p25") return ref(r.p25);
      if (column == "median") return ref(r.median);
      if (column == "p75") return ref(r.p75);
      if (column == "max") return ref(r.max);
      return std::nullopt;
    }
    case TableId::ranking: {
      if (homogeneous) return std::nullopt;
      const auto& cols = table_columns(TableId::ranking);
      const auto it = std::find(cols.begin(), cols.end(), column);
      if (it == cols.end()) return std::nullopt;
      const auto k = static_cast<std::size_t>(it - cols.begin());
      if (pow) return ref_abs(static_cast<double>(kRankingPow[k]), 0.0);
      return ref(static_cast<double>(kRankingPots[k]));
    }
    case TableId::energy:
      if (column != "total_active_time_1e6_s") return std::nullopt;
      return pow ? ref_rel(kEnergyRows[i], 0.005) : ref_rel(kEnergyRows[i], 0.02);
    case TableId::shape:
      if (!homogeneous) return std::nullopt;
      if (column == "skewness") {
        if (pow) return ref_rel(kSkewRows[i], 0.20);
        if (team_size == 64) return ref_abs(kSkewRows[i], 0.1);
        return ref(kSkewRows[i]);
      }
      if (column == "excess_kurtosis") {
        if (pow) return ref_rel(kKurtRows[i], 0.30);
        if (team_size == 64) return ref_abs(kKurtRows[i], 0.2);
        return ref(kKurtRows[i]);
      }
      return std::nullopt;
    case TableId::correlation:
      if (!homogeneous || column != "correlation") return std::nullopt;
      return pow ? ref_abs(kCorrelationRows[i], 0.1) : ref(kCorrelationRows[i]);
  }
  return std::nullopt;
}

json emit_table(std::span<const ScenarioSummary> summaries, TableId table) {
  if (table == TableId::ranking &&
      std::none_of(summaries.begin(), summaries.end(),
                   [](const ScenarioSummary& s) { return s.condition() == Condition::high_perf; })) {
    throw UsageError("ranking table requires a high_perf scenario summary");
  }
  const std::vector<std::string> columns = table_columns(table);
  json doc;
  doc["table"] = to_string(table);
  json header = json::array({"scenario"});
  for (const auto& c : columns) header.push_back(c);
  doc["columns"] = header;
  if (table == TableId::energy) doc["units"] = "1e6 seconds";
  if (table == TableId::ranking) doc["participant_note"] = "ranks of the high-performance node";

  json rows = json::array();
  for (const ScenarioSummary& s : summaries) {
    if (!table_includes(table, s)) continue;
    json row;
    row["scenario"] = s.label();
    row["team_size"] = s.config_echo.team_size;
    row["condition"] = to_string(s.condition());
    if (s.config_echo.high_perf_override) row["tracked_participant"] = s.config_echo.high_perf_override->id;
    json reference = json::object();
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const auto v = cell_value(s, table, c);
      if (table == TableId::ranking && v) {
        row[columns[c]] = static_cast<std::uint64_t>(*v);
      } else {
        row[columns[c]] = value_or_null(v);
      }
      if (const auto r = reference_value(table, s.config_echo.team_size, s.condition(), columns[c])) {
        reference[columns[c]] = reference_to_json(*r);
      }
    }
    if (!reference.empty()) row["reference"] = reference;
    rows.push_back(row);
  }
  doc["rows"] = rows;
  return doc;
}

json delta_report(std::span<const ScenarioSummary> summaries) {
  json cells = json::array();
  std::size_t flagged = 0;
  for (TableId table : kAllTables) {
    const std::vector<std::string> columns = table_columns(table);
    for (const ScenarioSummary& s : summaries) {
      if (!table_includes(table, s)) continue;
      for (std::size_t c = 0; c < columns.size(); ++c) {
        const auto r = reference_value(table, s.config_echo.team_size, s.condition(), columns[c]);
        if (!r) continue;
        const auto v = cell_value(s, table, c);
        json cell{{"table", to_string(table)},
                  {"scenario", s.label()},
                  {"condition", to_string(s.condition())},
                  {"column", columns[c]},
                  {"computed", value_or_null(v)},
                  {"reference", r->value}};
        if (v) cell["delta"] = *v - r->value;
        if (r->tolerance) {
          cell["tolerance"] = *r->tolerance;
          cell["tolerance_kind"] = r->relative ? "relative" : "absolute";
          const bool out = !v || !r->within(*v);
          cell["flagged"] = out;
          if (out) ++flagged;
        }
        cells.push_back(cell);
      }
    }
  }
  return json{{"cells", cells}, {"flagged_count", flagged}};
}

std::vector<HistogramBin> emit_reward_histogram(std::span<const double> rewards, double bin_width) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw UsageError("emit_reward_histogram: bin width must be positive");
  }
  if (rewards.empty()) return {};
  const double max = *std::max_element(rewards.begin(), rewards.end());
  const double min = *std::min_element(rewards.begin(), rewards.end());
  if (min < 0.0) throw UsageError("emit_reward_histogram: negative reward");

  const auto bins = static_cast<std::size_t>(std::floor(max / bin_width)) + 1;
  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) out[b].lower_edge = static_cast<double>(b) * bin_width;
  for (double r : rewards) {
    const auto b = std::min(static_cast<std::size_t>(std::floor(r / bin_width)), bins - 1);
    ++out[b].count;
  }
  return out;
}

std::vector<HistogramBin> emit_reward_histogram(const RunResult& run, double bin_width) {
  return emit_reward_histogram(run.cumulative_reward, bin_width);
}

json to_json(const ScenarioConfig& c) {
  json doc{{"participant_count", c.participant_count},
           {"team_size", c.team_size},
           {"rounds", c.rounds},
           {"runs", c.runs},
           {"base_time", c.base_time},
           {"reward_per_round", c.reward_per_round},
           {"perf_range", {c.perf_range.lo, c.perf_range.hi}},
           {"multiplier_range", {c.multiplier_range.lo, c.multiplier_range.hi}},
           {"high_perf_id", nullptr},
           {"high_perf_factor", nullptr},
           {"master_seed", c.master_seed},
           {"redraw_profile_per_run", c.redraw_profile_per_run}};
  if (c.high_perf_override) {
    doc["high_perf_id"] = c.high_perf_override->id;
    doc["high_perf_factor"] = c.high_perf_override->factor;
  }
  return doc;
}

namespace {

template <typename T>
T field(const json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(key + ": wrong type (" + value.dump() + ")");
  }
}

Interval interval_field(const json& value, const std::string& key) {
  if (!value.is_array() || value.size() != 2) {
    throw ConfigError(key + ": expected [lo, hi]");
  }
  return {field<double>(value[0], key), field<double>(value[1], key)};
}

std::size_t count_field(const json& value, const std::string& key) {
  if (!value.is_number_unsigned()) throw ConfigError(key + ": expected a non-negative integer");
  return value.get<std::size_t>();
}

}  // namespace

ScenarioConfig config_from_json(const json& doc) {
  return apply_config_json(ScenarioConfig{}, doc);
}

ScenarioConfig apply_config_json(ScenarioConfig c, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  const json* hp_id = nullptr;
  const json* hp_factor = nullptr;
  for (const auto& [key, value] : doc.items()) {
    if (key == "participant_count") c.participant_count = count_field(value, key);
    else if (key == "team_size") c.team_size = count_field(value, key);
    else if (key == "rounds") c.rounds = count_field(value, key);
    else if (key == "runs") c.runs = count_field(value, key);
    else if (key == "base_time") c.base_time = field<double>(value, key);
    else if (key == "reward_per_round") c.reward_per_round = field<double>(value, key);
    else if (key == "perf_range") c.perf_range = interval_field(value, key);
    else if (key == "multiplier_range") c.multiplier_range = interval_field(value, key);
    else if (key == "high_perf_id") hp_id = &value;
    else if (key == "high_perf_factor") hp_factor = &value;
    else if (key == "master_seed") c.master_seed = field<std::uint64_t>(value, key);
    else if (key == "redraw_profile_per_run") c.redraw_profile_per_run = field<bool>(value, key);
    else throw ConfigError(key + ": unknown config key");
  }
  const bool clear = (hp_id && hp_id->is_null()) || (hp_factor && hp_factor->is_null());
  if (clear) {
    if ((hp_id && !hp_id->is_null()) || (hp_factor && !hp_factor->is_null())) {
      throw ConfigError("high_perf_id: high_perf_id and high_perf_factor must both be set or both null");
    }
    c.high_perf_override.reset();
  } else if (hp_id || hp_factor) {
    if (!c.high_perf_override && !(hp_id && hp_factor)) {
      throw ConfigError("high_perf_id: high_perf_id and high_perf_factor must be set together");
    }
    HighPerfOverride hp = c.high_perf_override.value_or(HighPerfOverride{});
    if (hp_id) hp.id = count_field(*hp_id, "high_perf_id");
    if (hp_factor) hp.factor = field<double>(*hp_factor, "high_perf_factor");
    c.high_perf_override = hp;
  }
  return c;
}

json to_json(const ScenarioSummary& s) {
  const DistStats& d = s.reward_stats;
  json doc{{"scenario", s.label()},
           {"condition", to_string(s.condition())},
           {"config", to_json(s.config_echo)},
           {"reward_stats",
            {{"mean", d.mean}, {"std_dev", d.std_dev}, {"min", d.min}, {"p25", d.p25},
             {"median", d.median}, {"p75", d.p75}, {"max", d.max}}},
           {"shape_stats", nullptr},
           {"correlation", value_or_null(s.correlation)},
           {"total_active_time_mean", s.total_active_time_mean},
           {"ranking", nullptr}};
  if (s.shape_stats) {
    doc["shape_stats"] = {{"skewness", s.shape_stats->skewness},
                          {"excess_kurtosis", s.shape_stats->excess_kurtosis}};
  }
  if (s.ranking) {
    json by_rank = json::array();
    for (auto c : s.ranking->by_rank) by_rank.push_back(c);
    doc["ranking"] = {{"by_rank", by_rank}, {"eleven_or_lower", s.ranking->eleven_or_lower}};
  }
  return doc;
}

ScenarioSummary summary_from_json(const json& doc) {
  try {
    ScenarioSummary s;
    s.config_echo = config_from_json(doc.at("config"));
    const json& d = doc.at("reward_stats");
    s.reward_stats = {d.at("mean").get<double>(),   d.at("std_dev").get<double>(),
                      d.at("min").get<double>(),    d.at("p25").get<double>(),
                      d.at("median").get<double>(), d.at("p75").get<double>(),
                      d.at("max").get<double>()};
    if (const json& sh = doc.at("shape_stats"); !sh.is_null()) {
      s.shape_stats = ShapeStats{sh.at("skewness").get<double>(), sh.at("excess_kurtosis").get<double>()};
    }
    if (const json& c = doc.at("correlation"); !c.is_null()) s.correlation = c.get<double>();
    s.total_active_time_mean = doc.at("total_active_time_mean").get<double>();
    if (const json& r = doc.at("ranking"); !r.is_null()) {
      RankingHistogram h;
      const json& by_rank = r.at("by_rank");
      if (by_rank.size() != h.by_rank.size()) throw UsageError("summary: ranking has wrong length");
      for (std::size_t i = 0; i < h.by_rank.size(); ++i) h.by_rank[i] = by_rank[i].get<std::uint64_t>();
      h.eleven_or_lower = r.at("eleven_or_lower").get<std::uint64_t>();
      s.ranking = h;
    }
    return s;
  } catch (const json::exception& e) {
    throw UsageError(std::string("summary: malformed document: ") + e.what());
  }
}

void write_report_bundle(const ReportBundle& bundle, std::ostream& out) {
  json doc;
  doc["tool_version"] = bundle.tool_version;
  if (bundle.emitted_at) doc["emitted_at"] = *bundle.emitted_at;
  if (bundle.sweep_seed) doc["sweep_seed"] = *bundle.sweep_seed;
  json scenarios = json::array();
  for (const auto& s : bundle.summaries) scenarios.push_back(to_json(s));
  doc["scenarios"] = scenarios;
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write_report_bundle: sink write failed; output is partial");
}

ReportBundle read_report_bundle(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("summary: not valid JSON: ") + e.what());
  }
  ReportBundle bundle;
  try {
    bundle.tool_version = doc.at("tool_version").get<std::string>();
    if (doc.contains("emitted_at")) bundle.emitted_at = doc["emitted_at"].get<std::string>();
    if (doc.contains("sweep_seed")) bundle.sweep_seed = doc["sweep_seed"].get<std::uint64_t>();
    for (const json& s : doc.at("scenarios")) bundle.summaries.push_back(summary_from_json(s));
  } catch (const json::exception& e) {
    throw UsageError(std::string("summary: malformed document: ") + e.what());
  }
  return bundle;
}

}  // namespace pots
