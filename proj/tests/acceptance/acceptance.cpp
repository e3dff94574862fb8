// Acceptance suite: one PASS/FAIL line per criterion.
//
//   tldram_acceptance        run every criterion
//   tldram_acceptance N...   run the listed criteria
//
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tldram/audit.hpp"
#include "tldram/bitline.hpp"
#include "tldram/calibration.hpp"
#include "tldram/die_size.hpp"
#include "tldram/experiment.hpp"

using namespace tldram;
using nlohmann::json;

namespace {

// Tolerances and limits.
constexpr double kAnchorTol = 0.05;
constexpr double kHeldOutTol = 0.10;
constexpr double kDie32Tol = 0.02;
constexpr double kDieSegTol = 0.005;
constexpr double kDie512Tol = 1e-12;
constexpr double kMinNearHit = 0.80;
constexpr int kAuditRuns = 100;
constexpr std::uint64_t kMaxAuditRequests = 100'000;
constexpr int kTrendDraws = 200;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> body;
};

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

bitline::RcNetworkParams reference_params() {
  static const bitline::RcNetworkParams p = derive_device_timing(reference_config()).params;
  return p;
}

// A run whose log, energy and report are checked by criteria 9 and 10.
struct RecordedRun {
  std::string name;
  std::string report_json;
  std::string report_csv;
  std::string command_log;
  double energy_total = 0;
  EnergyModel energy;
};

RecordedRun record(std::string name, const RunOutput& run, const EnergyModel& model) {
  RecordedRun r;
  r.name = std::move(name);
  r.report_json = to_json(run.report).dump(2);
  std::ostringstream csv, log;
  write_csv(csv, run.report);
  write_command_log(log, run.simulation.log);
  r.report_csv = csv.str();
  r.command_log = log.str();
  r.energy_total = run.report.energy.total;
  r.energy = model;
  return r;
}

// ---------------------------------------------------------------------------
// Run sets shared by several criteria.

ExperimentConfig audit_config(int index) {
  std::mt19937_64 rng(0xA0D17ull + static_cast<std::uint64_t>(index));
  auto pick = [&](std::uint64_t lo, std::uint64_t hi) { return lo + rng() % (hi - lo + 1); };
  auto real = [&](double lo, double hi) { return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  ExperimentConfig c;
  c.name = "audit-" + std::to_string(index);
  c.rc.params = reference_params();
  c.device.channels = static_cast<std::uint32_t>(pick(1, 2));
  c.device.ranks_per_channel = static_cast<std::uint32_t>(pick(1, 2));
  c.device.banks_per_rank = static_cast<std::uint32_t>(pick(1, 8));
  c.device.subarrays_per_bank = static_cast<std::uint32_t>(pick(1, 2));
  const int cells_choices[] = {128, 256, 512};
  c.device.cells_per_bitline = cells_choices[pick(0, 2)];
  c.device.rows_near = static_cast<std::uint32_t>(pick(1, std::min(64, c.device.cells_per_bitline / 2)));
  c.device.columns_per_row = static_cast<std::uint32_t>(1u << pick(3, 7));
  c.device.queue_capacity = static_cast<std::uint32_t>(pick(4, 32));
  c.device.max_pending_fills = static_cast<std::uint32_t>(pick(1, 4));
  c.device.length_dependent_timing = pick(0, 3) != 0;

  const CachePolicy policies[] = {CachePolicy::none, CachePolicy::cache_on_access, CachePolicy::wait_based,
                                  CachePolicy::benefit_based, CachePolicy::static_map};
  c.policy.policy = policies[pick(0, 4)];
  c.policy.decay_interval = pick(100, 20'000);
  c.policy.caching_threshold = static_cast<std::uint32_t>(pick(0, 3));
  c.policy.benefit_increment_per_saved_cycle = pick(0, 1) == 1;
  if (pick(0, 9) == 0) {
    c.device.mode = DeviceMode::conventional;
    c.policy.policy = CachePolicy::none;
  }
  const auto rows_far = static_cast<std::uint32_t>(c.device.cells_per_bitline) - c.device.rows_near;
  if (c.policy.policy == CachePolicy::static_map) {
    const auto pins = static_cast<std::uint32_t>(pick(1, c.device.rows_near));
    for (std::uint32_t i = 0; i < pins; ++i) c.policy.static_map_list.push_back(i * (rows_far / pins));
  }

  c.cores = static_cast<std::uint32_t>(pick(1, 4));
  c.non_memory_ipc = real(0.5, 3.0);
  c.seed = rng();
  SyntheticSection s;
  s.request_count = pick(1'000, 25'000);
  s.zipf_exponent = real(0.0, 1.6);
  const std::uint64_t capacity = std::uint64_t{c.device.channels} * c.device.ranks_per_channel *
                                 c.device.banks_per_rank * c.device.subarrays_per_bank * rows_far;
  // Occasionally overshoot the device so out-of-range requests are exercised.
  s.working_set_rows = std::max<std::uint64_t>(1, pick(0, 9) == 0 ? capacity + 64 : pick(1, capacity));
  s.read_fraction = real(0.0, 1.0);
  s.mean_gap = real(0.0, 40.0);
  c.workload.synthetic = s;
  return c;
}

ExperimentConfig equivalence_config(int index, bool conventional) {
  std::mt19937_64 rng(0xE901ull + static_cast<std::uint64_t>(index));
  ExperimentConfig c;
  c.name = "equivalence-" + std::to_string(index);
  c.rc.params = reference_params();
  c.device.channels = static_cast<std::uint32_t>(1 + rng() % 2);
  c.device.banks_per_rank = static_cast<std::uint32_t>(1 + rng() % 8);
  c.device.rows_near = static_cast<std::uint32_t>(1 + rng() % 128);
  c.device.uniform_baseline_timing = true;
  c.policy.policy = CachePolicy::none;
  c.cores = static_cast<std::uint32_t>(1 + rng() % 3);
  c.seed = rng();
  SyntheticSection s;
  s.request_count = 2'000 + rng() % 6'000;
  s.zipf_exponent = static_cast<double>(rng() % 17) / 10.0;
  // Stay inside the far segment so both devices expose the same rows.
  const std::uint64_t visible = std::uint64_t{c.device.channels} * c.device.banks_per_rank *
                                (static_cast<std::uint64_t>(c.device.cells_per_bitline) - c.device.rows_near);
  s.working_set_rows = 1 + rng() % visible;
  s.read_fraction = static_cast<double>(rng() % 11) / 10.0;
  s.mean_gap = static_cast<double>(rng() % 30);
  c.workload.synthetic = s;
  return conventional ? baseline_config(c) : c;
}

constexpr int kEquivalenceRuns = 12;

std::vector<json> fig8_values() {
  std::vector<json> v;
  for (int n = 1; n <= 256; n *= 2) v.emplace_back(n);
  return v;
}

// Every config-driven acceptance run, for criteria 9 and 10.
std::vector<ExperimentConfig> all_acceptance_configs() {
  std::vector<ExperimentConfig> out;
  for (int i = 0; i < kAuditRuns; ++i) out.push_back(audit_config(i));
  for (int i = 0; i < kEquivalenceRuns; ++i) {
    out.push_back(equivalence_config(i, false));
    out.push_back(equivalence_config(i, true));
  }
  const auto ref = reference_config();
  out.push_back(baseline_config(ref));
  for (const auto& v : fig8_values()) out.push_back(with_parameter(ref, "rows_near", v));
  return out;
}

std::vector<RecordedRun> run_all(const std::vector<ExperimentConfig>& configs) {
  std::vector<RecordedRun> out(configs.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(configs.size());
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < configs.size();) {
      try {
        out[i] = record(configs[i].name, run_experiment(configs[i]), configs[i].energy);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < worker_count(); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Criteria.

Outcome criterion_table_timing() {
  using namespace bitline;
  const auto anchors = reference_anchors();
  const std::vector<CalibrationAnchor> fit{anchors[0], anchors[1]};
  const std::vector<FreeParam> free{FreeParam::c_cell, FreeParam::r_drive, FreeParam::r_iso};
  const auto cal = calibrate(RcNetworkParams{}, fit, free);
  bool pass = true;
  std::ostringstream d;
  const double tol[] = {kAnchorTol, kAnchorTol, kHeldOutTol};
  const char* label[] = {"512 baseline", "near-32", "far-480 held-out"};
  for (std::size_t i = 0; i < 3; ++i) {
    const double t = derive_timings(cal.params, anchors[i].geometry, anchors[i].segment).t_rc;
    const double rel = (t - anchors[i].target_t_rc_ns) / anchors[i].target_t_rc_ns;
    const bool ok = std::abs(rel) <= tol[i];
    pass = pass && ok;
    d << label[i] << " t_rc " << fmt(t, 5) << " ns vs " << anchors[i].target_t_rc_ns << " (" << fmt(rel * 100, 3)
      << "%, tol " << tol[i] * 100 << "%" << (ok ? "" : " MISS") << "); ";
  }
  for (auto p : cal.unconstrained) d << to_string(p) << " unconstrained by the fit anchors; ";
  std::string text = d.str();
  text.resize(text.size() - 2);
  return {pass, text};
}

Outcome criterion_die_size() {
  using namespace bitline;
  const auto m = fit_die_size_model(512, 32, 3.76, 1.03);
  const double f512 = die_size_factor(SegmentGeometry::unsegmented(512), 512, m);
  const double f32 = die_size_factor(SegmentGeometry::unsegmented(32), 512, m);
  const double fseg = die_size_factor({32, 480}, 512, m);
  const bool pass = std::abs(f512 - 1.0) <= kDie512Tol && std::abs(f32 - 3.76) / 3.76 <= kDie32Tol &&
                    std::abs(fseg - 1.03) / 1.03 <= kDieSegTol;
  return {pass, "512: " + fmt(f512) + ", 32: " + fmt(f32) + ", 32/480: " + fmt(fseg) + " (sense amp " +
                    fmt(m.senseamp_cells, 5) + " cells, isolation " + fmt(m.isolation_cells, 4) + " cells)"};
}

Outcome criterion_segment_trends() {
  const std::vector<int> grid{8, 16, 32, 64, 128, 256};
  std::mt19937_64 rng(0xF164ull);
  auto real = [&](double lo, double hi) { return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  int failures = 0;
  std::string first_failure;
  for (int draw = 0; draw <= kTrendDraws; ++draw) {
    bitline::RcNetworkParams p = reference_params();
    if (draw > 0) {
      p.c_cell = real(0.05, 0.5);
      p.c_senseamp = real(5, 200);
      p.r_drive = real(5, 200);
      p.r_iso = real(5, 200);
    }
    const auto rows = bitline::sweep_segment_lengths(p, 512, grid);
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
      const bool near_up = rows[i].near.t_rc > rows[i - 1].near.t_rc;
      const bool far_rcd_down_as_near_shrinks = rows[i].far->t_rcd > rows[i - 1].far->t_rcd;
      const bool far_rc_down_as_far_shrinks = rows[i].far->t_rc < rows[i - 1].far->t_rc;
      const bool near_fastest = rows[i].near.t_rc < rows[i].far->t_rc && rows[i].near.t_rc < rows.back().near.t_rc;
      if (!(near_up && far_rcd_down_as_near_shrinks && far_rc_down_as_far_shrinks && near_fastest)) {
        if (failures++ == 0) first_failure = "draw " + std::to_string(draw) + " near " + std::to_string(grid[i]);
      }
    }
  }
  return {failures == 0, std::to_string(kTrendDraws + 1) + " parameter draws x " + std::to_string(grid.size()) +
                             " geometries, " + std::to_string(failures) + " trend violations" +
                             (failures ? " (first: " + first_failure + ")" : "")};
}

Outcome criterion_audit() {
  std::vector<ExperimentConfig> configs;
  for (int i = 0; i < kAuditRuns; ++i) configs.push_back(audit_config(i));
  std::vector<std::size_t> commands(configs.size()), violations(configs.size());
  std::vector<std::uint64_t> requests(configs.size());
  std::vector<std::string> first(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < configs.size();) {
      const auto run = run_experiment(configs[i]);
      const auto dev = make_device_config(configs[i], run.timing.table);
      const auto report = audit_command_log(run.simulation.log, dev);
      commands[i] = report.commands;
      violations[i] = report.violations.size();
      requests[i] = run.report.requests + run.report.dropped;
      if (!report.ok()) first[i] = report.violations.front().rule;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < worker_count(); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::size_t total_cmds = 0, total_viol = 0;
  std::uint64_t max_req = 0;
  std::string detail;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    total_cmds += commands[i];
    total_viol += violations[i];
    max_req = std::max(max_req, requests[i]);
    if (violations[i] && detail.empty()) detail = "; first violation in " + configs[i].name + ": " + first[i];
  }
  const bool pass = total_viol == 0 && max_req <= kMaxAuditRequests;
  return {pass, std::to_string(configs.size()) + " runs, " + std::to_string(total_cmds) + " commands, " +
                    std::to_string(total_viol) + " violations, largest run " + std::to_string(max_req) +
                    " requests" + detail};
}

Outcome criterion_equivalence() {
  int mismatches = 0;
  std::uint64_t compared = 0;
  for (int i = 0; i < kEquivalenceRuns; ++i) {
    const auto tl = run_experiment(equivalence_config(i, false));
    const auto conv = run_experiment(equivalence_config(i, true));
    const auto& a = tl.simulation;
    const auto& b = conv.simulation;
    bool same = a.requests.size() == b.requests.size() && a.counters.cores.size() == b.counters.cores.size();
    for (std::size_t k = 0; same && k < a.requests.size(); ++k) {
      const auto& x = a.requests[k];
      const auto& y = b.requests[k];
      same = x.id == y.id && x.core_id == y.core_id && x.arrival == y.arrival && x.completion == y.completion;
    }
    for (std::size_t k = 0; same && k < a.counters.cores.size(); ++k) {
      same = a.counters.cores[k].latencies == b.counters.cores[k].latencies &&
             a.counters.cores[k].cycles == b.counters.cores[k].cycles &&
             a.counters.cores[k].retired == b.counters.cores[k].retired;
    }
    for (std::size_t k = 0; same && k < tl.report.cores.size(); ++k) {
      // Bitwise comparison of the derived floating-point statistics.
      same = json(tl.report.cores[k].mean_latency).dump() == json(conv.report.cores[k].mean_latency).dump() &&
             tl.report.cores[k].p95_latency == conv.report.cores[k].p95_latency &&
             json(tl.report.cores[k].ipc).dump() == json(conv.report.cores[k].ipc).dump();
    }
    mismatches += !same;
    compared += a.requests.size();
  }
  return {mismatches == 0, std::to_string(kEquivalenceRuns) + " traces, " + std::to_string(compared) +
                               " requests compared, " + std::to_string(mismatches) + " mismatching runs"};
}

Outcome criterion_direction() {
  const auto ref = reference_config();
  const auto base = run_experiment(baseline_config(ref));
  const auto run = run_experiment(ref, base.report);
  const auto& c = *run.report.comparison;
  const double hit = run.report.near_hit_fraction;
  const bool pass = c.ipc_improvement_pct > 0.0 && c.energy_delta_pct < 0.0 && hit > kMinNearHit;
  return {pass, "IPC " + fmt(c.ipc_improvement_pct, 4) + "%, energy " + fmt(c.energy_delta_pct, 4) +
                    "% vs conventional, near hit " + fmt(hit * 100, 4) + "% (needs > 0, < 0, > " +
                    fmt(kMinNearHit * 100) + "%)"};
}

Outcome criterion_fig8() {
  const auto s = sweep(reference_config(), "rows_near", fig8_values(), worker_count());
  const auto& rows = s.table.rows;
  const auto best = std::max_element(rows.begin(), rows.end(),
                                     [](const ComparisonRow& a, const ComparisonRow& b) { return a.speedup < b.speedup; });
  const bool interior = best->speedup > rows.front().speedup && best->speedup > rows.back().speedup;
  std::ostringstream d;
  for (const auto& r : rows) d << r.value << ":" << fmt(r.speedup, 4) << " ";
  d << "peak at rows_near=" << best->value;
  return {interior, d.str()};
}

Outcome criterion_transfer() {
  const auto ref = reference_config();
  const auto timing = derive_device_timing(ref);
  const DeviceConfig cfg = make_device_config(ref, timing.table);
  const double t_ck = ref.device.t_ck_ns;
  // Independent cycle computation from the nanosecond timings.
  const auto cycles = [t_ck](double ns) { return static_cast<Cycle>(std::ceil(ns / t_ck - 1e-9)); };
  const Cycle expected = std::max(cycles(timing.far.t_rc), cycles(timing.near.t_rc)) + cycles(4.0);
  std::ostringstream d;
  bool pass = true;

  {
    DramDevice dev(cfg);
    const Command xfer{CommandKind::transfer, 0, {RowSegment::far, 100}, 0, RowAddress{RowSegment::near, 5}};
    const Cycle start = 7;
    const Cycle done = dev.issue(xfer, start);
    const Command act_other{CommandKind::act, 1, {RowSegment::far, 3}, 0, std::nullopt};
    const bool zero_channel = !dev.channel_busy(0, start) && dev.can_issue(act_other, start);
    const Command act_same{CommandKind::act, 0, {RowSegment::far, 3}, 0, std::nullopt};
    const bool occupied = done - start == expected && !dev.can_issue(act_same, done - 1) &&
                          dev.bank(0, done - 1).status == BankStatus::transferring && dev.can_issue(act_same, done);
    pass = pass && zero_channel && occupied;
    d << "occupancy " << (done - start) << " cycles (expected " << expected << "), channel "
      << (zero_channel ? "free" : "BUSY") << " during transfer; ";
  }

  // A request to another bank, arriving at different points of an in-flight
  // transfer, completes exactly as in a transfer-free run.
  int differing = 0;
  for (Cycle arrival : {Cycle{0}, Cycle{1}, Cycle{10}, Cycle{40}, Cycle{expected - 1}}) {
    for (std::uint32_t bank : {1u, 2u, 7u}) {
      Cycle completion[2] = {0, 0};
      for (int with_transfer = 0; with_transfer < 2; ++with_transfer) {
        DramDevice dev(cfg);
        PolicyConfig none;
        none.policy = CachePolicy::none;
        Controller ctl(dev, none);
        if (with_transfer) {
          dev.issue({CommandKind::transfer, 0, {RowSegment::far, 9}, 0, RowAddress{RowSegment::near, 0}}, 0);
        }
        const Request req{1, 0, arrival, RequestKind::read, ctl.mapper().encode({0, bank, 42, 3})};
        std::vector<ServedRequest> served;
        for (Cycle now = 0; served.empty() && now < 10'000; ++now) {
          if (now == arrival) ctl.enqueue(req, now);
          ctl.tick(now, served);
        }
        completion[with_transfer] = served.empty() ? 0 : served.front().completion;
      }
      differing += completion[0] == 0 || completion[0] != completion[1];
    }
  }
  pass = pass && differing == 0;
  d << "15 concurrent other-bank requests, " << differing << " with changed latency";
  return {pass, d.str()};
}

// Independent energy accumulator over the exported command-log text.
double reaccumulate(const std::string& log_text, const EnergyModel& m) {
  std::istringstream in(log_text);
  std::string line;
  std::getline(in, line);  // header
  double total = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string part; std::getline(ss, part, ',');) f.push_back(part);
    const std::string& kind = f.at(2);
    const std::string& seg = f.at(3);
    if (kind == "ACT") total += seg == "near" ? m.e_act_near : seg == "far" ? m.e_act_far : m.e_act_baseline;
    else if (kind == "RD" || kind == "WR") total += m.e_rdwr;
    else if (kind == "TRANSFER") total += m.e_transfer;
  }
  return total;
}

Outcome criterion_energy() {
  const auto runs = run_all(all_acceptance_configs());
  int mismatches = 0;
  std::string first;
  for (const auto& r : runs) {
    const double again = reaccumulate(r.command_log, r.energy);
    if (again != r.energy_total) {
      if (mismatches++ == 0) first = r.name + ": " + fmt(again, 17) + " vs " + fmt(r.energy_total, 17);
    }
  }
  return {mismatches == 0, std::to_string(runs.size()) + " runs re-accumulated, " + std::to_string(mismatches) +
                               " mismatches" + (first.empty() ? "" : " (first: " + first + ")")};
}

Outcome criterion_determinism() {
  const auto configs = all_acceptance_configs();
  const auto a = run_all(configs);
  const auto b = run_all(configs);
  int differing = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    differing += a[i].report_json != b[i].report_json || a[i].report_csv != b[i].report_csv ||
                 a[i].command_log != b[i].command_log;
  }
  // The sweep merges parallel results by value order.
  const auto s1 = sweep(reference_config(), "rows_near", fig8_values(), 1);
  const auto sn = sweep(reference_config(), "rows_near", fig8_values(), worker_count());
  const bool sweep_same = to_json(s1.table).dump() == to_json(sn.table).dump();
  return {differing == 0 && sweep_same, std::to_string(a.size()) + " runs repeated, " + std::to_string(differing) +
                                            " differing; serial vs parallel sweep " +
                                            (sweep_same ? "identical" : "DIFFERENT")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "calibrated t_rc anchors and held-out far prediction", 1.0, criterion_table_timing},
      {2, "die-size model", 1.0, criterion_die_size},
      {3, "segment-length trend suite", 10.0, criterion_segment_trends},
      {4, "timing-safety audit on randomized runs", 300.0, criterion_audit},
      {5, "conventional vs segmented-with-baseline-timing equivalence", 10.0, criterion_equivalence},
      {6, "benefit-based caching: IPC up, energy down, near hit > 80%", 60.0, criterion_direction},
      {7, "near-capacity sweep peaks at an interior size", 300.0, criterion_fig8},
      {8, "inter-segment transfer contract", 10.0, criterion_transfer},
      {9, "energy re-accumulated from the command log", 120.0, criterion_energy},
      {10, "determinism of every acceptance run", 240.0, criterion_determinism},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (const auto& c : criteria) selected.push_back(c.id);
  }

  bool all = true;
  for (int id : selected) {
    const auto it = std::find_if(criteria.begin(), criteria.end(), [id](const Criterion& c) { return c.id == id; });
    if (it == criteria.end()) {
      std::printf("FAIL [%d] unknown criterion\n", id);
      all = false;
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it->body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < it->limit_s;
    const bool pass = o.pass && in_time;
    all = all && pass;
    std::printf("%s [%d] %s: %s (%.2f s, limit %.0f s%s)\n", pass ? "PASS" : "FAIL", it->id, it->name,
                o.detail.c_str(), secs, it->limit_s, in_time ? "" : ", TOO SLOW");
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
