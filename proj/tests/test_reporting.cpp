#include <doctest.h>

#include <sstream>
#include <streambuf>

#include "pots/errors.hpp"
#include "pots/reporting.hpp"

using namespace pots;

namespace {

RunResult sample_run(std::size_t n, std::size_t rounds, std::uint64_t seed) {
  ScenarioConfig c;
  c.participant_count = n;
  c.team_size = 2;
  c.rounds = rounds;
  return run_simulation(c, seed);
}

/// Accepts `budget` bytes, then reports failure.
class FailingBuf : public std::streambuf {
 public:
  explicit FailingBuf(std::size_t budget) : budget_(budget) {}

 protected:
  int_type overflow(int_type ch) override {
    if (budget_ == 0) return traits_type::eof();
    --budget_;
    return ch;
  }

 private:
  std::size_t budget_;
};

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

std::vector<ScenarioSummary> ci_sweep() {
  SweepSpec spec;
  spec.base_config = ci_scale(paper_defaults());
  spec.base_config.runs = 3;
  spec.team_sizes = {1, 2, 32};
  spec.conditions = {Condition::homogeneous, Condition::high_perf};
  return sweep_team_sizes(spec);
}

}  // namespace

TEST_CASE("participant CSV layout") {
  const RunResult run = sample_run(4, 20, 1);
  std::ostringstream out;
  CHECK(write_participant_csv(run, 7, out) == 4);
  const std::string text = out.str();
  CHECK(count_lines(text) == 5);
  CHECK(text.rfind(std::string(kParticipantCsvHeader) + "\n", 0) == 0);
  CHECK(text.find("\r") == std::string::npos);
  CHECK(text.find("\n7,0,") != std::string::npos);

  std::ostringstream again;
  write_participant_csv(run, 7, again);
  CHECK(again.str() == text);
}

TEST_CASE("zero-round CSV: no rewards, everyone tied first") {
  const RunResult run = sample_run(6, 0, 3);
  std::istringstream in([&] {
    std::ostringstream out;
    write_participant_csv(run, 0, out);
    return out.str();
  }());
  const auto records = read_participant_csv(in);
  REQUIRE(records.size() == 6);
  for (const auto& r : records) {
    CHECK(r.reward == 0.0);
    CHECK(r.rank == 1);
    CHECK(r.wins == 0);
  }
}

TEST_CASE("CSV round trip recovers rewards and wins") {
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const RunResult run = sample_run(40, 200, seed);
    std::stringstream io;
    write_participant_csv(run, seed, io);
    const auto records = read_participant_csv(io);
    REQUIRE(records.size() == 40);
    for (std::size_t i = 0; i < 40; ++i) {
      CHECK(records[i].participant_id == i);
      CHECK(records[i].run_id == seed);
      CHECK(records[i].wins == run.win_count[i]);
      CHECK(format_float(records[i].reward) == format_float(run.cumulative_reward[i]));
      CHECK(records[i].rank == competition_rank(run.cumulative_reward, i));
    }
  }
}

TEST_CASE("CSV sink failure is an I/O error") {
  const RunResult run = sample_run(40, 10, 2);
  FailingBuf buf(200);
  std::ostream sink(&buf);
  CHECK_THROWS_WITH_AS(write_participant_csv(run, 0, sink), doctest::Contains("partial"), IoError);
  FailingBuf none(0);
  std::ostream dead(&none);
  CHECK_THROWS_AS(write_participant_csv(run, 0, dead), IoError);
}

TEST_CASE("format_float uses six significant digits") {
  CHECK(format_float(1.0 / 3.0) == "0.333333");
  CHECK(format_float(1378894123.0) == "1.37889e+09");
  CHECK(format_float(0.0) == "0");
  CHECK(format_float(2.5) == "2.5");
}

TEST_CASE("reward histogram") {
  const auto bins = emit_reward_histogram(std::vector<double>{0, 0, 5, 10}, 5.0);
  CHECK(bins == std::vector<HistogramBin>{{0, 2}, {5, 1}, {10, 1}});
  const auto wide = emit_reward_histogram(std::vector<double>{0, 3, 4}, 100.0);
  CHECK(wide == std::vector<HistogramBin>{{0, 3}});
  CHECK_THROWS_AS(emit_reward_histogram(std::vector<double>{1}, 0.0), UsageError);
  CHECK_THROWS_AS(emit_reward_histogram(std::vector<double>{1}, -2.0), UsageError);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RunResult run = sample_run(50, 300, seed);
    std::size_t total = 0;
    for (const auto& b : emit_reward_histogram(run, 2.5)) total += b.count;
    CHECK(total == 50);
  }
}

TEST_CASE("tables mirror the published layouts") {
  const auto summaries = ci_sweep();

  const auto rewards = emit_table(summaries, TableId::rewards);
  CHECK(rewards["columns"] ==
        nlohmann::json({"scenario", "mean", "std_dev", "min", "p25", "median", "p75", "max"}));
  REQUIRE(rewards["rows"].size() == 6);
  CHECK(rewards["rows"][0]["scenario"] == "PoW");
  CHECK(rewards["rows"][2]["scenario"] == "PoTS (32)");
  CHECK(rewards["rows"][0]["reference"]["std_dev"]["value"] == 54.81);

  const auto energy = emit_table(summaries, TableId::energy);
  const double pow_energy = energy["rows"][0]["total_active_time_1e6_s"].get<double>();
  CHECK(pow_energy == doctest::Approx(summaries[0].total_active_time_mean / 1e6));
  CHECK(energy["rows"][0]["reference"]["total_active_time_1e6_s"]["value"] == 1378.89);
  CHECK(energy["units"] == "1e6 seconds");

  const auto ranking = emit_table(summaries, TableId::ranking);
  REQUIRE(ranking["rows"].size() == 3);
  CHECK(ranking["rows"][0]["1"] == 3);
  CHECK(ranking["rows"][0]["condition"] == "high_perf");

  const auto shape = emit_table(summaries, TableId::shape);
  CHECK(shape["columns"] == nlohmann::json({"scenario", "skewness", "excess_kurtosis"}));
  const auto corr = emit_table(summaries, TableId::correlation);
  CHECK(corr["rows"].size() == 6);

  std::vector<ScenarioSummary> homogeneous(summaries.begin(), summaries.begin() + 3);
  CHECK_THROWS_AS(emit_table(homogeneous, TableId::ranking), UsageError);
}

TEST_CASE("reference metadata for the PoTS(64) shape row") {
  const auto skew = reference_value(TableId::shape, 64, Condition::homogeneous, "skewness");
  const auto kurt = reference_value(TableId::shape, 64, Condition::homogeneous, "excess_kurtosis");
  REQUIRE(skew);
  REQUIRE(kurt);
  CHECK(skew->value == 0.008);
  CHECK(kurt->value == -0.66);
  CHECK(kurt->within(-0.5));
  CHECK_FALSE(kurt->within(-0.9));
  CHECK_FALSE(reference_value(TableId::shape, 64, Condition::high_perf, "skewness"));
  CHECK_FALSE(reference_value(TableId::shape, 3, Condition::homogeneous, "skewness"));
  const auto pow_rank = reference_value(TableId::ranking, 1, Condition::high_perf, "1");
  REQUIRE(pow_rank);
  CHECK(pow_rank->value == 100);
}

TEST_CASE("delta report flags out-of-tolerance cells") {
  ScenarioSummary s;
  s.config_echo = paper_defaults();
  s.config_echo.high_perf_override.reset();
  s.config_echo.team_size = 64;
  s.reward_stats.mean = 10.0;
  s.shape_stats = ShapeStats{0.5, -0.66};
  s.total_active_time_mean = 21.5e6;
  const auto report = delta_report(std::vector<ScenarioSummary>{s});
  bool saw_skew = false;
  for (const auto& cell : report["cells"]) {
    if (cell["column"] == "skewness") {
      saw_skew = true;
      CHECK(cell["flagged"] == true);
    }
    if (cell["column"] == "excess_kurtosis") CHECK(cell["flagged"] == false);
  }
  CHECK(saw_skew);
  CHECK(report["flagged_count"].get<int>() >= 1);
}

TEST_CASE("summary documents round-trip") {
  ReportBundle bundle;
  bundle.summaries = ci_sweep();
  bundle.sweep_seed = 77;
  std::stringstream io;
  write_report_bundle(bundle, io);
  const std::string first = io.str();
  const ReportBundle back = read_report_bundle(io);
  CHECK(back.summaries == bundle.summaries);
  CHECK(back.sweep_seed == bundle.sweep_seed);
  CHECK_FALSE(back.emitted_at.has_value());
  std::ostringstream again;
  write_report_bundle(back, again);
  CHECK(again.str() == first);

  std::istringstream junk("{not json");
  CHECK_THROWS_AS(read_report_bundle(junk), UsageError);
}

TEST_CASE("config documents") {
  const ScenarioConfig paper = paper_defaults();
  CHECK(config_from_json(to_json(paper)) == paper);

  const auto doc = nlohmann::json::parse(R"({"participant_count": 64, "team_size": 8, "perf_range": [1, 2]})");
  const ScenarioConfig c = config_from_json(doc);
  CHECK(c.participant_count == 64);
  CHECK(c.team_size == 8);
  CHECK(c.perf_range == Interval{1, 2});
  CHECK_FALSE(c.high_perf_override);

  CHECK_THROWS_WITH_AS(config_from_json(nlohmann::json::parse(R"({"teamsize": 2})")),
                       doctest::Contains("teamsize"), ConfigError);
  CHECK_THROWS_WITH_AS(config_from_json(nlohmann::json::parse(R"({"rounds": -1})")),
                       doctest::Contains("rounds"), ConfigError);
  CHECK_THROWS_WITH_AS(config_from_json(nlohmann::json::parse(R"({"perf_range": [1]})")),
                       doctest::Contains("perf_range"), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"high_perf_id": 3})")), ConfigError);
  const auto cleared = apply_config_json(paper, nlohmann::json::parse(R"({"high_perf_id": null, "high_perf_factor": null})"));
  CHECK_FALSE(cleared.high_perf_override);
}
