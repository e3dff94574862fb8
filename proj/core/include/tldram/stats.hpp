#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tldram/controller.hpp"
#include "tldram/energy.hpp"

namespace tldram {

struct CoreCounters {
  std::uint32_t core_id = 0;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t dropped = 0;
  std::uint64_t retired = 0;
  Cycle cycles = 0;                 // cycle count when the core finished
  std::vector<Cycle> latencies;     // completion - arrival, one per served request
};

struct RunCounters {
  std::vector<CoreCounters> cores;
  CacheCounters cache;
  std::uint64_t transfers = 0;
  Cycle cycles = 0;
  EnergyTotals energy;
  std::vector<EpochCounters> epochs;
};

struct CoreReport {
  std::uint32_t core_id = 0;
  std::uint64_t requests = 0;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t dropped = 0;
  std::uint64_t retired = 0;
  Cycle cycles = 0;
  double mean_latency = 0;
  Cycle p95_latency = 0;
  double ipc = 0;
};

struct Comparison {
  std::string baseline;
  double weighted_speedup = 0;
  double ipc_improvement_pct = 0;  // (weighted_speedup / cores - 1) * 100
  double energy_delta_pct = 0;     // relative to the baseline's total energy
};

struct StatsReport {
  // Sweep labelling: which parameter this run varies and its value.
  std::string parameter;
  std::string value;

  std::vector<CoreReport> cores;
  std::uint64_t requests = 0;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t dropped = 0;
  double near_hit_fraction = 0;
  double miss_fraction = 1;
  CacheCounters cache;
  std::uint64_t transfers = 0;
  Cycle cycles = 0;
  EnergyTotals energy;
  double energy_per_request = 0;
  std::optional<Comparison> comparison;
  std::vector<EpochCounters> epochs;
};

// Nearest-rank percentile over a full sample (0 for an empty one).
Cycle percentile(std::vector<Cycle> sample, double pct);

// Throws EmptyRunError for a run of zero cycles.
StatsReport finalize(const RunCounters& raw);
// Report for a run that simulated nothing: all counts and IPCs zero.
StatsReport empty_report(const RunCounters& raw);

// Attaches weighted speedup and energy delta against `baseline`. Throws
// ComparisonError on a core-count mismatch or a baseline core with zero IPC.
void compare_to(StatsReport& report, const StatsReport& baseline, std::string baseline_name);
StatsReport finalize(const RunCounters& raw, const StatsReport& baseline, std::string baseline_name = "baseline");

struct ComparisonRow {
  std::string value;
  double speedup = 0;  // weighted speedup vs the baseline, else summed IPC
  double energy = 0;
};

struct ComparisonTable {
  std::string parameter;
  std::vector<ComparisonRow> rows;
  std::size_t argmax = 0;  // first row with the largest speedup
};

// Throws ComparisonError on an empty list, mixed parameter labels or
// repeated values.
ComparisonTable compare_matrix(std::span<const StatsReport> reports);

nlohmann::json to_json(const StatsReport& r);
nlohmann::json to_json(const ComparisonTable& t);
void write_csv(std::ostream& out, const StatsReport& r);
void write_csv(std::ostream& out, const ComparisonTable& t);

}  // namespace tldram
