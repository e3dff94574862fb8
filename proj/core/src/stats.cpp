#include "tldram/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>

#include "tldram/error.hpp"

namespace tldram {

Cycle percentile(std::vector<Cycle> sample, double pct) {
  if (sample.empty()) return 0;
  std::sort(sample.begin(), sample.end());
  const auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * static_cast<double>(sample.size())));
  return sample[std::clamp<std::size_t>(rank, 1, sample.size()) - 1];
}

namespace {

StatsReport assemble(const RunCounters& raw) {
  StatsReport r;
  for (const auto& c : raw.cores) {
    CoreReport cr;
    cr.core_id = c.core_id;
    cr.reads = c.reads;
    cr.writes = c.writes;
    cr.requests = c.reads + c.writes;
    cr.dropped = c.dropped;
    cr.retired = c.retired;
    cr.cycles = c.cycles;
    if (!c.latencies.empty()) {
      const double sum = std::accumulate(c.latencies.begin(), c.latencies.end(), 0.0);
      cr.mean_latency = sum / static_cast<double>(c.latencies.size());
      cr.p95_latency = percentile(c.latencies, 95.0);
    }
    cr.ipc = c.cycles > 0 ? static_cast<double>(c.retired) / static_cast<double>(c.cycles) : 0.0;
    r.requests += cr.requests;
    r.reads += cr.reads;
    r.writes += cr.writes;
    r.dropped += cr.dropped;
    r.cores.push_back(cr);
  }
  r.cache = raw.cache;
  const std::uint64_t accesses = raw.cache.hits + raw.cache.misses;
  r.near_hit_fraction =
      accesses > 0 ? static_cast<double>(raw.cache.hits) / static_cast<double>(accesses) : 0.0;
  r.miss_fraction = 1.0 - r.near_hit_fraction;
  r.transfers = raw.transfers;
  r.cycles = raw.cycles;
  r.energy = raw.energy;
  r.energy_per_request = r.requests > 0 ? raw.energy.total / static_cast<double>(r.requests) : 0.0;
  r.epochs = raw.epochs;
  return r;
}

}  // namespace

StatsReport finalize(const RunCounters& raw) {
  if (raw.cycles == 0) throw EmptyRunError("cannot finalize a run of zero cycles");
  return assemble(raw);
}

StatsReport empty_report(const RunCounters& raw) {
  StatsReport r = assemble(raw);
  for (auto& c : r.cores) c.ipc = 0;
  return r;
}

void compare_to(StatsReport& report, const StatsReport& baseline, std::string baseline_name) {
  if (report.cores.size() != baseline.cores.size()) {
    throw ComparisonError("baseline has " + std::to_string(baseline.cores.size()) + " cores, run has " +
                          std::to_string(report.cores.size()));
  }
  if (report.cores.empty()) throw ComparisonError("no cores to compare");
  Comparison c;
  c.baseline = std::move(baseline_name);
  for (std::size_t i = 0; i < report.cores.size(); ++i) {
    const double base = baseline.cores[i].ipc;
    if (!(base > 0.0)) throw ComparisonError("baseline core " + std::to_string(i) + " has zero IPC");
    c.weighted_speedup += report.cores[i].ipc / base;
  }
  c.ipc_improvement_pct = (c.weighted_speedup / static_cast<double>(report.cores.size()) - 1.0) * 100.0;
  const double eb = baseline.energy.total;
  c.energy_delta_pct = eb > 0.0 ? (report.energy.total - eb) / eb * 100.0 : 0.0;
  report.comparison = c;
}

StatsReport finalize(const RunCounters& raw, const StatsReport& baseline, std::string baseline_name) {
  StatsReport r = finalize(raw);
  compare_to(r, baseline, std::move(baseline_name));
  return r;
}

ComparisonTable compare_matrix(std::span<const StatsReport> reports) {
  if (reports.empty()) throw ComparisonError("no reports to compare");
  ComparisonTable t;
  t.parameter = reports.front().parameter;
  std::set<std::string> seen;
  for (const auto& r : reports) {
    if (r.parameter != t.parameter) {
      throw ComparisonError("reports vary different parameters ('" + t.parameter + "' vs '" + r.parameter + "')");
    }
    if (!seen.insert(r.value).second) throw ComparisonError("repeated parameter value '" + r.value + "'");
    ComparisonRow row;
    row.value = r.value;
    if (r.comparison) {
      row.speedup = r.comparison->weighted_speedup;
    } else {
      for (const auto& c : r.cores) row.speedup += c.ipc;
    }
    row.energy = r.energy.total;
    t.rows.push_back(row);
  }
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    if (t.rows[i].speedup > t.rows[t.argmax].speedup) t.argmax = i;
  }
  return t;
}

namespace {

nlohmann::json to_json(const CacheCounters& c) {
  return {{"hits", c.hits}, {"misses", c.misses}, {"fills", c.fills}, {"writebacks", c.writebacks},
          {"evictions", c.evictions}};
}

}  // namespace

nlohmann::json to_json(const StatsReport& r) {
  nlohmann::json j;
  j["parameter"] = r.parameter;
  j["value"] = r.value;
  auto& cores = j["cores"] = nlohmann::json::array();
  for (const auto& c : r.cores) {
    cores.push_back({{"core_id", c.core_id},
                     {"requests", c.requests},
                     {"reads", c.reads},
                     {"writes", c.writes},
                     {"dropped", c.dropped},
                     {"retired", c.retired},
                     {"cycles", c.cycles},
                     {"mean_latency", c.mean_latency},
                     {"p95_latency", c.p95_latency},
                     {"ipc", c.ipc}});
  }
  j["requests"] = r.requests;
  j["reads"] = r.reads;
  j["writes"] = r.writes;
  j["dropped"] = r.dropped;
  j["near_hit_fraction"] = r.near_hit_fraction;
  j["miss_fraction"] = r.miss_fraction;
  j["cache"] = to_json(r.cache);
  j["transfers"] = r.transfers;
  j["cycles"] = r.cycles;
  j["energy"] = {{"total", r.energy.total},
                 {"act_near", r.energy.act_near},
                 {"act_far", r.energy.act_far},
                 {"act_baseline", r.energy.act_baseline},
                 {"column", r.energy.column},
                 {"transfers", r.energy.transfers}};
  j["energy_per_request"] = r.energy_per_request;
  if (r.comparison) {
    j["comparison"] = {{"baseline", r.comparison->baseline},
                       {"weighted_speedup", r.comparison->weighted_speedup},
                       {"ipc_improvement_pct", r.comparison->ipc_improvement_pct},
                       {"energy_delta_pct", r.comparison->energy_delta_pct}};
  } else {
    j["comparison"] = nullptr;
  }
  auto& epochs = j["epochs"] = nlohmann::json::array();
  for (const auto& e : r.epochs) {
    auto ej = to_json(e.counters);
    ej["start"] = e.start;
    epochs.push_back(ej);
  }
  return j;
}

nlohmann::json to_json(const ComparisonTable& t) {
  nlohmann::json j;
  j["parameter"] = t.parameter;
  j["argmax"] = t.rows.empty() ? nlohmann::json(nullptr) : nlohmann::json(t.rows[t.argmax].value);
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const auto& r : t.rows) rows.push_back({{"value", r.value}, {"speedup", r.speedup}, {"energy", r.energy}});
  return j;
}

namespace {

// Shortest round-trip formatting, same as the JSON output.
std::string num(double v) { return nlohmann::json(v).dump(); }

}  // namespace

void write_csv(std::ostream& out, const StatsReport& r) {
  out << "scope,core_id,requests,reads,writes,dropped,retired,cycles,mean_latency,p95_latency,ipc,"
         "near_hit_fraction,fills,writebacks,evictions,transfers,energy,energy_per_request,weighted_speedup,"
         "energy_delta_pct\n";
  for (const auto& c : r.cores) {
    out << "core," << c.core_id << ',' << c.requests << ',' << c.reads << ',' << c.writes << ',' << c.dropped << ','
        << c.retired << ',' << c.cycles << ',' << num(c.mean_latency) << ',' << c.p95_latency << ',' << num(c.ipc)
        << ",,,,,,,,,\n";
  }
  out << "all,," << r.requests << ',' << r.reads << ',' << r.writes << ',' << r.dropped << ",," << r.cycles
      << ",,,," << num(r.near_hit_fraction) << ',' << r.cache.fills << ',' << r.cache.writebacks << ','
      << r.cache.evictions << ',' << r.transfers << ',' << num(r.energy.total) << ',' << num(r.energy_per_request)
      << ',';
  if (r.comparison) out << num(r.comparison->weighted_speedup) << ',' << num(r.comparison->energy_delta_pct);
  else out << ',';
  out << '\n';
}

void write_csv(std::ostream& out, const ComparisonTable& t) {
  out << (t.parameter.empty() ? "value" : t.parameter) << ",speedup,energy,argmax\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out << t.rows[i].value << ',' << num(t.rows[i].speedup) << ',' << num(t.rows[i].energy) << ','
        << (i == t.argmax ? 1 : 0) << '\n';
  }
}

}  // namespace tldram
