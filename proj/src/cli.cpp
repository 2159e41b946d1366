#include "pots/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "pots/errors.hpp"

namespace pots::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RawFlags {
  bool paper_defaults = false;
  bool ci_scale = false;
  std::string config_path;
  std::size_t participants = 0;
  std::size_t team_size = 0;
  std::size_t rounds = 0;
  std::size_t runs = 0;
  std::uint64_t seed = 0;
  double base_time = 0.0;
  double reward = 0.0;
  std::string perf_range;
  std::string multiplier_range;
  std::size_t high_perf_id = 0;
  double high_perf_factor = 0.0;
  bool no_high_perf = false;
  bool fixed_profile = false;
  std::size_t threads = 1;
  std::string out_dir;
  bool raw_csv = false;
  bool timestamp = false;
  std::vector<std::size_t> team_sizes;
  std::vector<std::string> conditions;
  std::string input;
  std::vector<std::string> tables;
};

struct Options {
  CLI::Option* participants = nullptr;
  CLI::Option* team_size = nullptr;
  CLI::Option* rounds = nullptr;
  CLI::Option* runs = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* base_time = nullptr;
  CLI::Option* reward = nullptr;
  CLI::Option* perf_range = nullptr;
  CLI::Option* multiplier_range = nullptr;
  CLI::Option* high_perf_id = nullptr;
  CLI::Option* high_perf_factor = nullptr;
  CLI::Option* config = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* team_sizes = nullptr;
  CLI::Option* conditions = nullptr;
  CLI::Option* input = nullptr;
  CLI::Option* tables = nullptr;
};

void add_scenario_options(CLI::App& app, RawFlags& f, Options& o) {
  app.add_flag("--paper-defaults", f.paper_defaults,
               "Reference parameterization: n=1600, 1600 rounds, 100 runs, node 1000 at 2.5");
  app.add_flag("--ci-scale", f.ci_scale, "160 participants, 160 rounds, 20 runs (invariant checks only)");
  o.config = app.add_option("--config", f.config_path, "JSON config file keyed by ScenarioConfig field names");
  o.participants = app.add_option("--participants", f.participants, "participant_count");
  o.team_size = app.add_option("--team-size", f.team_size, "team_size (1 = PoW)");
  o.rounds = app.add_option("--rounds", f.rounds, "rounds per run");
  o.runs = app.add_option("--runs", f.runs, "independent runs per scenario");
  o.seed = app.add_option("--seed", f.seed, "master_seed (default " + std::to_string(ScenarioConfig::kDefaultSeed) + ")");
  o.base_time = app.add_option("--base-time", f.base_time, "base_time in seconds per team");
  o.reward = app.add_option("--reward", f.reward, "reward_per_round");
  o.perf_range = app.add_option("--perf-range", f.perf_range, "perf_range as lo,hi");
  o.multiplier_range = app.add_option("--multiplier-range", f.multiplier_range, "multiplier_range as lo,hi");
  o.high_perf_id = app.add_option("--high-perf-id", f.high_perf_id, "id of the high-performance node");
  o.high_perf_factor = app.add_option("--high-perf-factor", f.high_perf_factor, "its performance factor");
  app.add_flag("--no-high-perf", f.no_high_perf, "drop the high-performance override");
  app.add_flag("--fixed-profile", f.fixed_profile, "share one performance profile across runs");
  app.add_option("--threads", f.threads, "maximum concurrent runs")->check(CLI::PositiveNumber);
  app.add_flag("--raw-csv", f.raw_csv, "also write per-participant CSV files");
  app.add_flag("--timestamp", f.timestamp, "record the emission time in summary.json");
}

Interval parse_interval(const std::string& text, const char* field) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError(std::string(field) + ": expected lo,hi");
  try {
    std::size_t used_lo = 0;
    std::size_t used_hi = 0;
    const std::string lo_text = text.substr(0, comma);
    const std::string hi_text = text.substr(comma + 1);
    const double lo = std::stod(lo_text, &used_lo);
    const double hi = std::stod(hi_text, &used_hi);
    if (used_lo != lo_text.size() || used_hi != hi_text.size()) throw std::invalid_argument(text);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw ConfigError(std::string(field) + ": expected lo,hi numbers, got '" + text + "'");
  }
}

ScenarioConfig build_config(const RawFlags& f, const Options& o) {
  ScenarioConfig config = f.paper_defaults ? paper_defaults() : ScenarioConfig{};
  if (f.ci_scale) config = ci_scale(config);
  if (o.config->count() > 0) {
    std::ifstream in(f.config_path);
    if (!in) throw UsageError("--config: cannot read '" + f.config_path + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError("--config: '" + f.config_path + "' is not valid JSON: " + e.what());
    }
    config = apply_config_json(config, doc);
  }
  if (o.participants->count()) config.participant_count = f.participants;
  if (o.team_size->count()) config.team_size = f.team_size;
  if (o.rounds->count()) config.rounds = f.rounds;
  if (o.runs->count()) config.runs = f.runs;
  if (o.seed->count()) config.master_seed = f.seed;
  if (o.base_time->count()) config.base_time = f.base_time;
  if (o.reward->count()) config.reward_per_round = f.reward;
  if (o.perf_range->count()) config.perf_range = parse_interval(f.perf_range, "perf_range");
  if (o.multiplier_range->count()) {
    config.multiplier_range = parse_interval(f.multiplier_range, "multiplier_range");
  }
  if (o.high_perf_id->count() || o.high_perf_factor->count()) {
    HighPerfOverride hp = config.high_perf_override.value_or(HighPerfOverride{0, 2.5});
    if (!config.high_perf_override && !o.high_perf_id->count()) {
      throw ConfigError("high_perf_override: --high-perf-factor needs --high-perf-id");
    }
    if (o.high_perf_id->count()) hp.id = f.high_perf_id;
    if (o.high_perf_factor->count()) hp.factor = f.high_perf_factor;
    config.high_perf_override = hp;
  }
  if (f.no_high_perf) config.high_perf_override.reset();
  if (f.fixed_profile) config.redraw_profile_per_run = false;
  return config;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed; output is partial");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string csv_name(const ScenarioConfig& config) {
  return "participants_n" + std::to_string(config.team_size) + "_" +
         to_string(config.high_perf_override ? Condition::high_perf : Condition::homogeneous) + ".csv";
}

ScenarioSummary run_cell(const ScenarioConfig& config, const CliInvocation& inv) {
  const ExecutionOptions options{inv.threads};
  if (!inv.raw_csv) return execute_scenario(config, options);
  const std::vector<RunResult> runs = execute_runs(config, options);
  std::ostringstream csv;
  for (std::size_t r = 0; r < runs.size(); ++r) write_participant_csv(runs[r], r, csv, r == 0);
  if (runs.empty()) csv << kParticipantCsvHeader << '\n';
  write_file(inv.out_dir / csv_name(config), csv.str());
  return summarize_runs(config, runs);
}

void write_summary(const CliInvocation& inv, std::vector<ScenarioSummary> summaries,
                   std::optional<std::uint64_t> sweep_seed) {
  ReportBundle bundle;
  bundle.summaries = std::move(summaries);
  bundle.sweep_seed = sweep_seed;
  if (inv.timestamp) bundle.emitted_at = utc_timestamp();
  std::ostringstream doc;
  write_report_bundle(bundle, doc);
  write_file(inv.out_dir / "summary.json", doc.str());
}

std::string cell_text(const json& v) {
  if (v.is_null()) return "-";
  if (v.is_number_float()) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << v.get<double>();
    return os.str();
  }
  return v.dump();
}

void render_table(const json& table, std::ostream& out) {
  out << "== " << table.at("table").get<std::string>();
  if (table.contains("units")) out << " (" << table["units"].get<std::string>() << ")";
  out << " ==\n";
  const json& columns = table.at("columns");
  out << std::left << std::setw(12) << "scenario" << std::setw(13) << "condition";
  std::vector<int> widths(columns.size(), 12);
  for (std::size_t c = 1; c < columns.size(); ++c) {
    widths[c] = std::max(12, static_cast<int>(columns[c].get<std::string>().size()) + 2);
    out << std::right << std::setw(widths[c]) << columns[c].get<std::string>();
  }
  out << '\n';
  for (const json& row : table.at("rows")) {
    out << std::left << std::setw(12) << row.at("scenario").get<std::string>() << std::setw(13)
        << row.at("condition").get<std::string>();
    for (std::size_t c = 1; c < columns.size(); ++c) {
      out << std::right << std::setw(widths[c]) << cell_text(row.at(columns[c].get<std::string>()));
    }
    out << '\n';
  }
}

void summarize_to(std::ostream& out, const ScenarioSummary& s) {
  out << s.label() << " [" << to_string(s.condition()) << "] mean=" << format_float(s.reward_stats.mean)
      << " std=" << format_float(s.reward_stats.std_dev)
      << " active_time=" << format_float(s.total_active_time_mean / 1e6) << "e6 s";
  if (s.ranking) out << " rank1=" << s.ranking->count(1) << "/" << s.ranking->total();
  out << '\n';
}

}  // namespace

CliInvocation parse_and_validate(const std::vector<std::string>& arguments) {
  CLI::App app{"Team-sprint consensus round simulator", "pots_sim"};
  app.require_subcommand(1);
  RawFlags f;
  Options run_opts;
  Options sweep_opts;
  Options report_opts;

  CLI::App* run = app.add_subcommand("run", "execute one scenario");
  add_scenario_options(*run, f, run_opts);
  run_opts.out = run->add_option("--out", f.out_dir, "output directory");

  CLI::App* sweep = app.add_subcommand("sweep", "execute a team-size sweep");
  add_scenario_options(*sweep, f, sweep_opts);
  sweep_opts.out = sweep->add_option("--out", f.out_dir, "output directory");
  sweep_opts.team_sizes = sweep->add_option("--team-sizes", f.team_sizes, "comma-separated team sizes")
                              ->delimiter(',');
  sweep_opts.conditions =
      sweep->add_option("--conditions", f.conditions, "homogeneous,high_perf (default: both when an override is set)")
          ->delimiter(',');

  CLI::App* report = app.add_subcommand("report", "emit tables from a summary document");
  report_opts.out = report->add_option("--out", f.out_dir, "directory for table documents");
  report_opts.input = report->add_option("--input", f.input, "summary.json (default <out>/summary.json)");
  report_opts.tables =
      report->add_option("--table", f.tables, "rewards, ranking, energy, shape, correlation or all")
          ->delimiter(',');

  std::vector<std::string> reversed(arguments.rbegin(), arguments.rend());
  CliInvocation inv;
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    inv.help_requested = true;
    CLI::App* active = run->parsed() ? run : sweep->parsed() ? sweep : report->parsed() ? report : &app;
    inv.help_text = active->help();
    return inv;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  const Options& o = run->parsed() ? run_opts : sweep->parsed() ? sweep_opts : report_opts;
  inv.subcommand = run->parsed() ? Subcommand::run : sweep->parsed() ? Subcommand::sweep : Subcommand::report;
  inv.threads = std::max<std::size_t>(f.threads, 1);
  inv.raw_csv = f.raw_csv;
  inv.timestamp = f.timestamp;
  if (o.out->count()) {
    inv.out_dir = f.out_dir;
  } else if (const char* env = std::getenv(kOutDirEnv); env && *env) {
    inv.out_dir = env;
  } else {
    inv.out_dir = kDefaultOutDir;
  }

  if (inv.subcommand == Subcommand::report) {
    inv.input = o.input->count() ? fs::path(f.input) : inv.out_dir / "summary.json";
    for (const std::string& t : f.tables) {
      if (t == "all") {
        inv.tables.clear();
        break;
      }
      inv.tables.push_back(parse_table_id(t));
    }
    return inv;
  }

  if (o.config->count()) inv.config_path = f.config_path;
  inv.config = build_config(f, o);

  if (inv.subcommand == Subcommand::run) {
    inv.config.validate();
    return inv;
  }

  inv.team_sizes = o.team_sizes->count() ? f.team_sizes : std::vector<std::size_t>{1, 2, 4, 8, 16, 32, 64};
  if (o.conditions->count()) {
    for (const std::string& c : f.conditions) inv.conditions.push_back(parse_condition(c));
  } else {
    inv.conditions.push_back(Condition::homogeneous);
    if (inv.config.high_perf_override) inv.conditions.push_back(Condition::high_perf);
  }
  if (!inv.team_sizes.empty()) inv.config.team_size = inv.team_sizes.front();
  SweepSpec{inv.config, inv.team_sizes, inv.conditions}.validate();
  return inv;
}

int execute(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  if (inv.help_requested) {
    out << inv.help_text;
    return kSuccess;
  }
  (void)err;
  switch (inv.subcommand) {
    case Subcommand::run: {
      fs::create_directories(inv.out_dir);
      const ScenarioSummary summary = run_cell(inv.config, inv);
      write_summary(inv, {summary}, std::nullopt);
      summarize_to(out, summary);
      out << "wrote " << (inv.out_dir / "summary.json").string() << '\n';
      return kSuccess;
    }
    case Subcommand::sweep: {
      fs::create_directories(inv.out_dir);
      const SweepSpec spec{inv.config, inv.team_sizes, inv.conditions};
      std::vector<ScenarioSummary> summaries;
      for (Condition c : spec.conditions) {
        for (std::size_t n : spec.team_sizes) {
          summaries.push_back(run_cell(sweep_cell_config(spec, n, c), inv));
          summarize_to(out, summaries.back());
        }
      }
      write_summary(inv, std::move(summaries), inv.config.master_seed);
      out << "wrote " << (inv.out_dir / "summary.json").string() << '\n';
      return kSuccess;
    }
    case Subcommand::report: {
      std::ifstream in(*inv.input);
      if (!in) throw UsageError("--input: cannot read '" + inv.input->string() + "'");
      const ReportBundle bundle = read_report_bundle(in);
      const bool has_high_perf = std::any_of(bundle.summaries.begin(), bundle.summaries.end(), [](const ScenarioSummary& s) {
        return s.condition() == Condition::high_perf;
      });
      std::vector<TableId> tables = inv.tables;
      if (tables.empty()) {
        for (TableId t : kAllTables) {
          if (t != TableId::ranking || has_high_perf) tables.push_back(t);
        }
      }
      fs::create_directories(inv.out_dir);
      for (TableId t : tables) {
        const json doc = emit_table(bundle.summaries, t);
        write_file(inv.out_dir / ("table_" + to_string(t) + ".json"), doc.dump(2) + "\n");
        render_table(doc, out);
      }
      const json delta = delta_report(bundle.summaries);
      write_file(inv.out_dir / "delta_report.json", delta.dump(2) + "\n");
      out << "delta report: " << delta.at("flagged_count").get<std::size_t>()
          << " cell(s) outside tolerance\n";
      for (const json& cell : delta.at("cells")) {
        if (cell.value("flagged", false)) {
          out << "  FLAG " << cell.at("table").get<std::string>() << ' ' << cell.at("scenario").get<std::string>()
              << " [" << cell.at("condition").get<std::string>() << "] " << cell.at("column").get<std::string>()
              << ": computed " << cell_text(cell.at("computed")) << " vs reference "
              << cell_text(cell.at("reference")) << '\n';
        }
      }
      return kSuccess;
    }
  }
  return kRuntimeError;
}

int run_cli(const std::vector<std::string>& arguments, std::ostream& out, std::ostream& err) {
  try {
    return execute(parse_and_validate(arguments), out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace pots::cli
