#include "tldram/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "tldram/die_size.hpp"
#include "tldram/error.hpp"

namespace tldram {

using nlohmann::json;

DerivedTiming derive_device_timing(const ExperimentConfig& config) {
  DerivedTiming t;
  if (config.rc.params) {
    t.params = *config.rc.params;
  } else {
    t.calibration = bitline::calibrate(config.rc.initial, *config.rc.anchors, config.rc.free);
    t.params = t.calibration->params;
  }
  const auto& d = config.device;
  const int cells = d.cells_per_bitline;
  const int split = d.length_dependent_timing ? static_cast<int>(d.rows_near) : std::min(32, cells - 1);
  const bitline::SegmentGeometry geom{split, cells - split};
  t.baseline = bitline::derive_timings(t.params, bitline::SegmentGeometry::unsegmented(cells), bitline::Segment::near);
  if (d.uniform_baseline_timing) {
    t.near = t.far = t.baseline;
  } else {
    t.near = bitline::derive_timings(t.params, geom, bitline::Segment::near);
    t.far = bitline::derive_timings(t.params, geom, bitline::Segment::far);
  }
  t.table = make_timing_table(t.near, t.far, t.baseline, d.cl_ns, d.t_ck_ns, d.transfer_extra_ns);
  return t;
}

DeviceConfig make_device_config(const ExperimentConfig& config, const TimingTable& timing) {
  const auto& d = config.device;
  DeviceConfig c;
  c.channels = d.channels;
  c.ranks_per_channel = d.ranks_per_channel;
  c.banks_per_rank = d.banks_per_rank;
  c.subarrays_per_bank = d.subarrays_per_bank;
  c.rows_near = d.rows_near;
  c.rows_far = static_cast<std::uint32_t>(d.cells_per_bitline) - d.rows_near;
  c.columns_per_row = d.columns_per_row;
  c.t_ck_ns = d.t_ck_ns;
  c.timing = timing;
  c.mode = d.mode;
  return c;
}

std::vector<std::vector<TraceRecord>> load_workload(const ExperimentConfig& config,
                                                    const std::filesystem::path& base_dir) {
  std::vector<std::vector<TraceRecord>> traces;
  if (config.workload.synthetic) {
    const auto& s = *config.workload.synthetic;
    for (std::uint32_t i = 0; i < config.cores; ++i) {
      SyntheticSpec spec;
      spec.request_count = s.request_count;
      spec.zipf_exponent = s.zipf_exponent;
      spec.working_set_rows = s.working_set_rows;
      spec.read_fraction = s.read_fraction;
      spec.mean_gap = s.mean_gap;
      spec.seed = config.seed + i;
      spec.columns_per_row = config.device.columns_per_row;
      traces.push_back(generate_synthetic(spec));
    }
    return traces;
  }
  std::vector<std::vector<TraceRecord>> files;
  for (const auto& p : config.workload.traces) {
    std::filesystem::path path(p);
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    files.push_back(read_trace_file(path));
  }
  for (std::uint32_t i = 0; i < config.cores; ++i) traces.push_back(files.size() == 1 ? files[0] : files[i]);
  return traces;
}

ExperimentConfig baseline_config(const ExperimentConfig& config) {
  ExperimentConfig b = config;
  b.name = config.name + "-baseline";
  b.device.mode = DeviceMode::conventional;
  b.device.uniform_baseline_timing = false;
  b.policy.policy = CachePolicy::none;
  b.policy.static_map_list.clear();
  return b;
}

namespace {

RunOutput run_impl(const ExperimentConfig& config, const StatsReport* baseline,
                   const std::filesystem::path& base_dir) {
  RunOutput out;
  out.timing = derive_device_timing(config);
  SimulationInput in;
  in.device = make_device_config(config, out.timing.table);
  in.policy = config.policy;
  in.controller.queue_capacity = config.device.queue_capacity;
  in.controller.max_pending_fills = config.device.max_pending_fills;
  in.controller.epoch_length = config.device.epoch_length;
  in.energy = config.energy;
  in.non_memory_ipc = config.non_memory_ipc;
  in.traces = load_workload(config, base_dir);
  out.simulation = simulate(in);
  if (out.simulation.counters.cycles == 0) {
    out.report = empty_report(out.simulation.counters);
    return out;
  }
  out.report = finalize(out.simulation.counters);
  if (baseline) compare_to(out.report, *baseline, baseline->parameter.empty() ? "baseline" : baseline->parameter);
  return out;
}

}  // namespace

RunOutput run_experiment(const ExperimentConfig& config, const std::filesystem::path& base_dir) {
  return run_impl(config, nullptr, base_dir);
}

RunOutput run_experiment(const ExperimentConfig& config, const StatsReport& baseline,
                         const std::filesystem::path& base_dir) {
  return run_impl(config, &baseline, base_dir);
}

void write_run_outputs(const RunOutput& run, const std::filesystem::path& dir, bool command_log) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json");
    out << to_json(run.report).dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "report.csv");
    write_csv(out, run.report);
  }
  if (command_log) {
    std::ofstream out(dir / "commands.csv");
    write_command_log(out, run.simulation.log);
  }
}

namespace {

const std::map<std::string, std::string, std::less<>>& sweep_paths() {
  static const std::map<std::string, std::string, std::less<>> paths{
      {"rows_near", "/device/rows_near"},
      {"policy", "/policy/policy"},
      {"decay_interval", "/policy/decay_interval"},
      {"zipf_exponent", "/workload/synthetic/zipf_exponent"},
  };
  return paths;
}

}  // namespace

const std::vector<std::string>& sweepable_parameters() {
  static const std::vector<std::string> names{"rows_near", "segment_length", "policy", "decay_interval",
                                              "zipf_exponent"};
  return names;
}

ExperimentConfig with_parameter(const ExperimentConfig& config, std::string_view parameter, const json& value) {
  const auto it = sweep_paths().find(parameter);
  if (it == sweep_paths().end()) {
    throw ParameterError("'" + std::string(parameter) + "' is not a simulation sweep parameter");
  }
  if (parameter == "zipf_exponent" && !config.workload.synthetic) {
    throw ParameterError("zipf_exponent sweeps need a synthetic workload");
  }
  json j = to_json(config);
  j[json::json_pointer(it->second)] = value;
  return parse_config(j);
}

std::string parameter_label(const json& value) {
  return value.is_string() ? value.get<std::string>() : value.dump();
}

SweepOutput sweep(const ExperimentConfig& config, std::string_view parameter, const std::vector<json>& values,
                  unsigned jobs, const std::filesystem::path& base_dir) {
  if (std::find(sweepable_parameters().begin(), sweepable_parameters().end(), parameter) ==
      sweepable_parameters().end()) {
    throw ParameterError("unknown sweep parameter '" + std::string(parameter) + "'");
  }
  if (parameter == "segment_length") {
    throw ParameterError("segment_length is a bitline sweep; it produces no simulation reports");
  }
  if (values.empty()) throw ParameterError("sweep needs at least one value");

  std::vector<ExperimentConfig> configs;
  for (const auto& v : values) configs.push_back(with_parameter(config, parameter, v));

  // Baselines are shared by every value whose conventional counterpart is
  // the same configuration.
  std::vector<std::string> baseline_keys;
  std::map<std::string, std::size_t> baseline_index;
  std::vector<ExperimentConfig> baselines;
  for (const auto& c : configs) {
    ExperimentConfig b = baseline_config(c);
    b.device.rows_near = config.device.rows_near;  // irrelevant to an unsegmented device
    b.name = config.name + "-baseline";
    const std::string key = to_json(b).dump();
    if (baseline_index.emplace(key, baselines.size()).second) baselines.push_back(b);
    baseline_keys.push_back(key);
  }

  const auto parallel = [jobs](std::size_t n, auto&& body) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  };

  std::vector<StatsReport> base_reports(baselines.size());
  parallel(baselines.size(), [&](std::size_t i) { base_reports[i] = run_experiment(baselines[i], base_dir).report; });

  SweepOutput out;
  out.parameter = std::string(parameter);
  out.reports.resize(configs.size());
  parallel(configs.size(), [&](std::size_t i) {
    const StatsReport& base = base_reports[baseline_index.at(baseline_keys[i])];
    StatsReport r = run_experiment(configs[i], base, base_dir).report;
    r.parameter = out.parameter;
    r.value = parameter_label(values[i]);
    out.reports[i] = std::move(r);
  });
  out.table = compare_matrix(out.reports);
  return out;
}

bool Reproduction::pass() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

template <class Get>
bool strictly_increasing(const std::vector<bitline::SweepRow>& rows, Get get) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(get(rows[i]) > get(rows[i - 1]))) return false;
  }
  return true;
}

}  // namespace

Reproduction segment_length_sweep(const bitline::RcNetworkParams& params, int total_cells,
                                  const std::vector<int>& near_lengths) {
  if (near_lengths.empty()) throw ParameterError("segment length sweep needs at least one length");
  std::vector<int> sorted = near_lengths;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  auto rows = bitline::sweep_segment_lengths(params, total_cells, sorted);

  Reproduction r;
  r.figure = "fig4";
  std::ostringstream csv;
  bitline::write_sweep_csv(csv, rows);
  r.csv = csv.str();

  const bitline::SweepRow reference = rows.back();
  rows.pop_back();
  r.checks.push_back({"near t_rc increases with near length",
                      strictly_increasing(rows, [](const bitline::SweepRow& x) { return x.near.t_rc; }), ""});
  r.checks.push_back({"far t_rcd decreases as the near segment shrinks",
                      strictly_increasing(rows, [](const bitline::SweepRow& x) { return x.far->t_rcd; }), ""});
  r.checks.push_back({"far t_rc decreases as the far segment shrinks",
                      strictly_increasing(rows, [](const bitline::SweepRow& x) { return -x.far->t_rc; }), ""});
  const bool near_faster = std::all_of(rows.begin(), rows.end(), [&](const bitline::SweepRow& x) {
    return x.near.t_rc < reference.near.t_rc && x.near.t_rc < x.far->t_rc;
  });
  r.checks.push_back({"near t_rc below both far and unsegmented t_rc", near_faster, ""});
  return r;
}

namespace {

Check tolerance_check(const std::string& name, double model, double reference, double tol,
                      std::ostringstream& csv) {
  const double rel = (model - reference) / reference;
  const bool pass = std::abs(rel) <= tol;
  csv << name << ',' << fmt(model) << ',' << fmt(reference) << ',' << fmt(rel) << ',' << fmt(tol) << ','
      << (pass ? "pass" : "fail") << '\n';
  return {name, pass, "model " + fmt(model) + " vs " + fmt(reference) + " (residual " + fmt(rel) + ")"};
}

Reproduction reproduce_table1() {
  using namespace bitline;
  Reproduction r;
  r.figure = "table1";
  std::ostringstream csv;
  csv << "quantity,model,reference,rel_error,tolerance,pass\n";

  const auto all = reference_anchors();
  const std::vector<CalibrationAnchor> fit_on{all[0], all[1]};
  const std::vector<FreeParam> free{FreeParam::c_cell, FreeParam::r_drive, FreeParam::r_iso};
  const auto cal = calibrate(RcNetworkParams{}, fit_on, free);
  const double t512 = derive_timings(cal.params, all[0].geometry, all[0].segment).t_rc;
  const double tnear = derive_timings(cal.params, all[1].geometry, all[1].segment).t_rc;
  const double tfar = derive_timings(cal.params, all[2].geometry, all[2].segment).t_rc;
  r.checks.push_back(tolerance_check("t_rc_512_unsegmented_ns", t512, all[0].target_t_rc_ns, 0.05, csv));
  r.checks.push_back(tolerance_check("t_rc_near32_ns", tnear, all[1].target_t_rc_ns, 0.05, csv));
  r.checks.push_back(tolerance_check("t_rc_far480_heldout_ns", tfar, all[2].target_t_rc_ns, 0.10, csv));

  const auto area = fit_die_size_model(512, 32, 3.76, 1.03);
  r.checks.push_back(
      tolerance_check("die_size_512", die_size_factor(SegmentGeometry::unsegmented(512), 512, area), 1.00, 1e-12, csv));
  r.checks.push_back(
      tolerance_check("die_size_32", die_size_factor(SegmentGeometry::unsegmented(32), 512, area), 3.76, 0.02, csv));
  r.checks.push_back(
      tolerance_check("die_size_32_480", die_size_factor(SegmentGeometry{32, 480}, 512, area), 1.03, 0.005, csv));
  r.csv = csv.str();
  return r;
}

Reproduction reproduce_fig3() {
  using namespace bitline;
  const auto params = derive_device_timing(reference_config()).params;
  const auto area = reference_die_size_model();
  Reproduction r;
  r.figure = "fig3";
  std::ostringstream csv;
  csv << "cells_per_bitline,t_rcd_ns,t_rc_ns,die_size_factor\n";
  std::vector<double> trcd, trc, die;
  for (int cells : {16, 32, 64, 128, 256, 512, 1024}) {
    const auto geom = SegmentGeometry::unsegmented(cells);
    const auto p = derive_timings(params, geom, Segment::near);
    const double f = die_size_factor(geom, 512, area);
    trcd.push_back(p.t_rcd);
    trc.push_back(p.t_rc);
    die.push_back(f);
    csv << cells << ',' << fmt(p.t_rcd) << ',' << fmt(p.t_rc) << ',' << fmt(f) << '\n';
  }
  r.csv = csv.str();
  const auto increasing = [](const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
  };
  const auto decreasing = [](const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::less_equal<>()) == v.end();
  };
  r.checks.push_back({"t_rcd increases with bitline length", increasing(trcd), ""});
  r.checks.push_back({"t_rc increases with bitline length", increasing(trc), ""});
  r.checks.push_back({"die size decreases with bitline length", decreasing(die), ""});
  return r;
}

Reproduction reproduce_fig4() {
  const auto params = derive_device_timing(reference_config()).params;
  return segment_length_sweep(params, 512, {8, 16, 32, 64, 128, 256});
}

Reproduction reproduce_fig8(unsigned jobs) {
  std::vector<json> values;
  for (int n = 1; n <= 256; n *= 2) values.emplace_back(n);
  const auto s = sweep(reference_config(), "rows_near", values, jobs);
  Reproduction r;
  r.figure = "fig8";
  std::ostringstream csv;
  write_csv(csv, s.table);
  r.csv = csv.str();
  const auto& rows = s.table.rows;
  const double peak = rows[s.table.argmax].speedup;
  const bool interior = peak > rows.front().speedup && peak > rows.back().speedup;
  r.checks.push_back({"speedup peaks at an interior near-segment size", interior,
                      "argmax rows_near=" + rows[s.table.argmax].value});
  return r;
}

}  // namespace

Reproduction reproduce(std::string_view figure, unsigned jobs) {
  if (figure == "table1") return reproduce_table1();
  if (figure == "fig3") return reproduce_fig3();
  if (figure == "fig4") return reproduce_fig4();
  if (figure == "fig8") return reproduce_fig8(jobs);
  throw ParameterError("unknown figure '" + std::string(figure) + "' (fig3, fig4, fig8, table1)");
}

json reference_config_json() {
  static const char* text = R"({
  "name": "reference",
  "device": {
    "mode": "tldram",
    "channels": 1,
    "ranks_per_channel": 1,
    "banks_per_rank": 8,
    "subarrays_per_bank": 1,
    "cells_per_bitline": 512,
    "rows_near": 32,
    "columns_per_row": 128,
    "t_ck_ns": 1.25,
    "cl_ns": 13.75,
    "transfer_extra_ns": 4.0
  },
  "rc": {
    "anchors": [
      {"cells_near": 512, "cells_far": 0, "segment": "near", "target_t_rc_ns": 52.5},
      {"cells_near": 32, "cells_far": 480, "segment": "near", "target_t_rc_ns": 23.1},
      {"cells_near": 32, "cells_far": 480, "segment": "far", "target_t_rc_ns": 65.8}
    ],
    "free": ["c_cell", "r_drive", "r_iso"]
  },
  "policy": {"policy": "benefit_based", "decay_interval": 10000, "caching_threshold": 1},
  "workload": {
    "synthetic": {
      "request_count": 50000,
      "zipf_exponent": 1.2,
      "working_set_rows": 1024,
      "read_fraction": 0.7,
      "mean_gap": 20.0
    }
  },
  "cores": 1,
  "non_memory_ipc": 1.0,
  "seed": 1
})";
  return json::parse(text);
}

ExperimentConfig reference_config() { return parse_config(reference_config_json()); }

}  // namespace tldram
