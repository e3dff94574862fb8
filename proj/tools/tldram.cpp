// tldram: run, sweep, reproduce and calibrate from the command line.
//
// Exit codes: 0 ok, 1 other error, 2 config, 3 parameter, 4 trace parse,
// 5 calibration, 6 reproduction tolerance failure, 106+ usage (CLI11).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "tldram/error.hpp"
#include "tldram/experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { ok = 0, other = 1, config_error = 2, parameter_error = 3, trace_error = 4, calibration_error = 5,
            tolerance_failure = 6 };

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("tldram");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("TLDRAM_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> sets;
  unsigned jobs = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON experiment config (default: built-in reference)");
  cmd->add_option("--seed", c.seed, "Override the config seed");
  cmd->add_option("--out", c.out, "Output directory (default: config output.dir)");
  cmd->add_option("--set", c.sets, "Override a config field, e.g. --set device.rows_near=64")->take_all();
}

struct Loaded {
  tldram::ExperimentConfig config;
  fs::path base_dir;
  fs::path out_dir;
};

Loaded load(const Common& c) {
  Loaded l;
  json j;
  if (c.config.empty()) {
    j = tldram::reference_config_json();
  } else {
    j = tldram::load_config_json(c.config);
    l.base_dir = fs::path(c.config).parent_path();
  }
  for (const auto& s : c.sets) tldram::apply_override(j, s);
  if (c.seed) j["seed"] = *c.seed;
  l.config = tldram::parse_config(j);
  l.out_dir = c.out.empty() ? fs::path(l.config.output.dir) : fs::path(c.out);
  spdlog::info("config '{}' seed {}", l.config.name, l.config.seed);
  return l;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path);
  if (!out) throw tldram::Error("cannot write " + path.string());
  out << text;
}

int cmd_run(const Common& c) {
  const auto l = load(c);
  const auto base = tldram::run_experiment(tldram::baseline_config(l.config), l.base_dir);
  spdlog::info("baseline: {} cycles", base.report.cycles);
  auto run = base.report.cycles > 0 ? tldram::run_experiment(l.config, base.report, l.base_dir)
                                    : tldram::run_experiment(l.config, l.base_dir);
  tldram::write_run_outputs(run, l.out_dir, l.config.output.command_log);
  const auto& r = run.report;
  std::cout << "requests " << r.requests << ", cycles " << r.cycles << ", near hit fraction " << r.near_hit_fraction
            << ", energy " << r.energy.total << '\n';
  if (r.comparison) {
    std::cout << "weighted speedup " << r.comparison->weighted_speedup << " (IPC " << r.comparison->ipc_improvement_pct
              << "%), energy " << r.comparison->energy_delta_pct << "% vs conventional\n";
  }
  std::cout << "wrote " << (l.out_dir / "report.json").string() << '\n';
  return ok;
}

std::vector<json> parse_values(const std::vector<std::string>& raw) {
  std::vector<json> values;
  for (const auto& s : raw) {
    try {
      values.push_back(json::parse(s));
    } catch (const json::parse_error&) {
      values.emplace_back(s);
    }
  }
  return values;
}

void print_checks(const tldram::Reproduction& r) {
  for (const auto& c : r.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cout << ": " << c.detail;
    std::cout << '\n';
  }
}

int cmd_sweep(const Common& c, const std::string& param, const std::vector<std::string>& raw) {
  const auto l = load(c);
  const auto values = parse_values(raw);
  if (values.empty()) throw tldram::ParameterError("sweep needs at least one value");
  if (param == "segment_length") {
    std::vector<int> lengths;
    for (const auto& v : values) {
      if (!v.is_number_integer()) throw tldram::ParameterError("segment lengths must be integers");
      lengths.push_back(v.get<int>());
    }
    const auto timing = tldram::derive_device_timing(l.config);
    const auto r = tldram::segment_length_sweep(timing.params, l.config.device.cells_per_bitline, lengths);
    write_text(l.out_dir / "sweep_segment_length.csv", r.csv);
    print_checks(r);
    return r.pass() ? ok : tolerance_failure;
  }
  const auto s = tldram::sweep(l.config, param, values, c.jobs, l.base_dir);
  std::ostringstream csv;
  tldram::write_csv(csv, s.table);
  write_text(l.out_dir / ("sweep_" + param + ".csv"), csv.str());
  json j;
  j["table"] = tldram::to_json(s.table);
  j["reports"] = json::array();
  for (const auto& r : s.reports) j["reports"].push_back(tldram::to_json(r));
  write_text(l.out_dir / ("sweep_" + param + ".json"), j.dump(2) + "\n");
  std::cout << csv.str();
  return ok;
}

int cmd_reproduce(const std::string& figure, const std::string& out, unsigned jobs) {
  const auto r = tldram::reproduce(figure, jobs);
  const fs::path dir = out.empty() ? fs::path("out") : fs::path(out);
  write_text(dir / (r.figure + ".csv"), r.csv);
  print_checks(r);
  std::cout << "wrote " << (dir / (r.figure + ".csv")).string() << '\n';
  return r.pass() ? ok : tolerance_failure;
}

int cmd_calibrate(const Common& c) {
  const auto l = load(c);
  const auto t = tldram::derive_device_timing(l.config);
  json j;
  j["params"] = tldram::to_json(l.config)["rc"]["initial"];
  auto& p = j["params"];
  p["c_cell"] = t.params.c_cell;
  p["c_senseamp"] = t.params.c_senseamp;
  p["r_drive"] = t.params.r_drive;
  p["r_iso"] = t.params.r_iso;
  if (t.calibration) {
    j["residuals"] = t.calibration->residuals;
    j["objective"] = t.calibration->objective;
    json unconstrained = json::array();
    for (auto f : t.calibration->unconstrained) unconstrained.push_back(std::string(tldram::bitline::to_string(f)));
    j["unconstrained"] = unconstrained;
  }
  const auto profile = [](const tldram::bitline::LatencyProfile& x) {
    return json{{"t_rcd_ns", x.t_rcd}, {"t_ras_ns", x.t_ras}, {"t_rp_ns", x.t_rp}, {"t_rc_ns", x.t_rc}};
  };
  j["near"] = profile(t.near);
  j["far"] = profile(t.far);
  j["baseline"] = profile(t.baseline);
  const std::string text = j.dump(2) + "\n";
  if (!c.out.empty()) write_text(fs::path(c.out) / "calibration.json", text);
  std::cout << text;
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Tiered-latency DRAM simulator"};
  app.require_subcommand(1);

  Common run_opts, sweep_opts, cal_opts;
  auto* run = app.add_subcommand("run", "Simulate one configuration against its conventional baseline");
  add_common(run, run_opts);

  auto* sw = app.add_subcommand("sweep", "Run one configuration per parameter value");
  add_common(sw, sweep_opts);
  std::string param;
  std::vector<std::string> values;
  sw->add_option("--param", param, "rows_near | segment_length | policy | decay_interval | zipf_exponent")
      ->required();
  sw->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');
  sw->add_option("--jobs", sweep_opts.jobs, "Parallel runs")->default_val(std::thread::hardware_concurrency());

  auto* rep = app.add_subcommand("reproduce", "Regenerate a reference figure or table with checks");
  std::string figure, rep_out;
  unsigned rep_jobs = std::thread::hardware_concurrency();
  rep->add_option("figure", figure, "fig3 | fig4 | fig8 | table1")
      ->required()
      ->check(CLI::IsMember({"fig3", "fig4", "fig8", "table1"}));
  rep->add_option("--out", rep_out, "Output directory (default: out)");
  rep->add_option("--jobs", rep_jobs, "Parallel runs");

  auto* cal = app.add_subcommand("calibrate", "Fit bitline parameters and print derived timings");
  add_common(cal, cal_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_opts);
    if (*sw) return cmd_sweep(sweep_opts, param, values);
    if (*rep) return cmd_reproduce(figure, rep_out, std::max(1u, rep_jobs));
    if (*cal) return cmd_calibrate(cal_opts);
  } catch (const tldram::ConfigError& e) {
    spdlog::error("config error at {}", e.what());
    return config_error;
  } catch (const tldram::TraceParseError& e) {
    spdlog::error("trace: {}", e.what());
    return trace_error;
  } catch (const tldram::CalibrationError& e) {
    spdlog::error("{}", e.what());
    for (double r : e.residuals()) spdlog::error("  residual {}", r);
    return calibration_error;
  } catch (const tldram::ParameterError& e) {
    spdlog::error("{}", e.what());
    return parameter_error;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return other;
  }
  return other;
}
