#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pots/cli.hpp"
#include "pots/errors.hpp"

using namespace pots;
using namespace pots::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pots_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(const std::vector<std::string>& args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("paper defaults with a team size override") {
  const auto inv = parse_and_validate({"run", "--paper-defaults", "--team-size", "8"});
  ScenarioConfig expected = paper_defaults();
  expected.team_size = 8;
  CHECK(inv.subcommand == Subcommand::run);
  CHECK(inv.config == expected);
  CHECK(inv.config.high_perf_override == HighPerfOverride{1000, 2.5});
}

TEST_CASE("indivisible population is a usage error") {
  CHECK_THROWS_WITH_AS(parse_and_validate({"run", "--participants", "10", "--team-size", "3"}),
                       doctest::Contains("population not divisible by team size"), ConfigError);
  std::string err;
  CHECK(run({"run", "--participants", "10", "--team-size", "3"}, nullptr, &err) == kUsageError);
  CHECK(err.find("population not divisible by team size") != std::string::npos);
}

TEST_CASE("sweep spec from flags") {
  const auto inv = parse_and_validate({"sweep", "--paper-defaults", "--team-sizes", "1,2,4,8,16,32,64"});
  CHECK(inv.subcommand == Subcommand::sweep);
  CHECK(inv.team_sizes == std::vector<std::size_t>{1, 2, 4, 8, 16, 32, 64});
  CHECK(inv.conditions == std::vector<Condition>{Condition::homogeneous, Condition::high_perf});
  const auto homo = parse_and_validate({"sweep", "--paper-defaults", "--conditions", "homogeneous"});
  CHECK(homo.conditions == std::vector<Condition>{Condition::homogeneous});
  CHECK_THROWS_AS(parse_and_validate({"sweep", "--paper-defaults", "--team-sizes", "1,3"}), ConfigError);
  CHECK_THROWS_AS(parse_and_validate({"sweep", "--conditions", "high_perf"}), ConfigError);
}

TEST_CASE("flag layering") {
  const fs::path dir = scratch("layering");
  fs::create_directories(dir);
  const fs::path cfg = dir / "config.json";
  std::ofstream(cfg) << R"({"participant_count": 200, "team_size": 4, "rounds": 30, "runs": 5,
                            "perf_range": [0.9, 1.1], "high_perf_id": 7, "high_perf_factor": 3.0})";
  const auto inv = parse_and_validate({"run", "--config", cfg.string(), "--rounds", "12", "--seed", "5",
                                       "--multiplier-range", "0.5,1.5", "--high-perf-factor", "4"});
  CHECK(inv.config.participant_count == 200);
  CHECK(inv.config.team_size == 4);
  CHECK(inv.config.rounds == 12);
  CHECK(inv.config.runs == 5);
  CHECK(inv.config.master_seed == 5);
  CHECK(inv.config.perf_range == Interval{0.9, 1.1});
  CHECK(inv.config.multiplier_range == Interval{0.5, 1.5});
  CHECK(inv.config.high_perf_override == HighPerfOverride{7, 4.0});

  const auto ci = parse_and_validate({"run", "--paper-defaults", "--ci-scale"});
  CHECK(ci.config.participant_count == 160);
  CHECK(ci.config.rounds == 160);
  CHECK(ci.config.runs == 20);
  CHECK(ci.config.high_perf_override->id == 100);

  const auto plain = parse_and_validate({"run"});
  CHECK(plain.config.master_seed == ScenarioConfig::kDefaultSeed);
  CHECK_FALSE(plain.config.high_perf_override);
  CHECK_FALSE(parse_and_validate({"run", "--paper-defaults", "--no-high-perf"}).config.high_perf_override);
  CHECK_FALSE(parse_and_validate({"run", "--fixed-profile"}).config.redraw_profile_per_run);
}

TEST_CASE("usage errors") {
  CHECK(run({"run", "--bogus"}) == kUsageError);
  CHECK(run({}) == kUsageError);
  CHECK(run({"run", "--config", "/nonexistent/pots.json"}) == kUsageError);
  CHECK(run({"run", "--perf-range", "1.5"}) == kUsageError);
  CHECK(run({"run", "--perf-range", "1.5,0.8"}) == kUsageError);
  CHECK(run({"run", "--high-perf-factor", "2"}) == kUsageError);
  CHECK(run({"report", "--table", "nonsense"}) == kUsageError);
  std::string out;
  CHECK(run({"run", "--help"}, &out) == kSuccess);
  CHECK(out.find("--team-size") != std::string::npos);
}

TEST_CASE("run with zero rounds writes zero-filled outputs") {
  const fs::path dir = scratch("zero");
  CHECK(run({"run", "--participants", "8", "--team-size", "2", "--rounds", "0", "--runs", "2", "--raw-csv",
             "--out", dir.string()}) == kSuccess);
  std::ifstream summary(dir / "summary.json");
  const ReportBundle bundle = read_report_bundle(summary);
  REQUIRE(bundle.summaries.size() == 1);
  CHECK(bundle.summaries[0].reward_stats.max == 0.0);
  CHECK(bundle.summaries[0].config_echo.rounds == 0);
  std::ifstream csv(dir / "participants_n2_homogeneous.csv");
  const auto records = read_participant_csv(csv);
  CHECK(records.size() == 16);
}

TEST_CASE("out directory falls back to the environment") {
  const fs::path dir = scratch("env");
  ::setenv(kOutDirEnv, dir.string().c_str(), 1);
  const auto inv = parse_and_validate({"run"});
  ::unsetenv(kOutDirEnv);
  CHECK(inv.out_dir == dir);
  CHECK(parse_and_validate({"run"}).out_dir == fs::path(kDefaultOutDir));
}

TEST_CASE("sweep then report") {
  const fs::path dir = scratch("report");
  CHECK(run({"sweep", "--paper-defaults", "--ci-scale", "--runs", "3", "--team-sizes", "1,4,32", "--out",
             dir.string()}) == kSuccess);
  std::string out;
  CHECK(run({"report", "--table", "energy", "--out", dir.string()}, &out) == kSuccess);
  CHECK(out.find("PoTS (32)") != std::string::npos);
  const auto energy = nlohmann::json::parse(slurp(dir / "table_energy.json"));
  CHECK(energy["table"] == "energy");
  CHECK(energy["rows"].size() == 6);
  CHECK(fs::exists(dir / "delta_report.json"));

  CHECK(run({"report", "--out", dir.string()}) == kSuccess);
  for (const char* t : {"rewards", "ranking", "energy", "shape", "correlation"}) {
    CHECK(fs::exists(dir / (std::string("table_") + t + ".json")));
  }

  const fs::path homo = scratch("report_homo");
  CHECK(run({"sweep", "--ci-scale", "--runs", "2", "--team-sizes", "1", "--out", homo.string()}) == kSuccess);
  CHECK(run({"report", "--table", "ranking", "--out", homo.string()}) == kUsageError);
  CHECK(run({"report", "--input", (homo / "missing.json").string()}) == kUsageError);
}

TEST_CASE("thread count does not change output bytes") {
  const fs::path a = scratch("threads1");
  const fs::path b = scratch("threads8");
  const std::vector<std::string> common{"sweep", "--paper-defaults", "--ci-scale", "--runs", "6",
                                        "--team-sizes", "1,8", "--raw-csv", "--seed", "123"};
  auto with = [&](const fs::path& dir, const char* threads) {
    auto args = common;
    args.insert(args.end(), {"--threads", threads, "--out", dir.string()});
    return run(args);
  };
  REQUIRE(with(a, "1") == kSuccess);
  REQUIRE(with(b, "8") == kSuccess);
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
    ++compared;
  }
  CHECK(compared == 5);  // summary + 4 participant CSVs
}
