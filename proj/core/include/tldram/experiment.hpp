#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tldram/config.hpp"
#include "tldram/simulation.hpp"
#include "tldram/stats.hpp"

namespace tldram {

struct DerivedTiming {
  bitline::RcNetworkParams params;
  std::optional<bitline::CalibrationResult> calibration;
  bitline::LatencyProfile near;
  bitline::LatencyProfile far;
  bitline::LatencyProfile baseline;
  TimingTable table;
};

// Calibrates (when the config gives anchors) and derives per-segment timings.
DerivedTiming derive_device_timing(const ExperimentConfig& config);
DeviceConfig make_device_config(const ExperimentConfig& config, const TimingTable& timing);

// Relative trace paths resolve against `base_dir`. Synthetic traces use seed
// config.seed + core index.
std::vector<std::vector<TraceRecord>> load_workload(const ExperimentConfig& config,
                                                    const std::filesystem::path& base_dir = {});

// The conventional-DRAM counterpart of a config: same workload and geometry,
// unsegmented bitlines, no near-segment policy.
ExperimentConfig baseline_config(const ExperimentConfig& config);

struct RunOutput {
  StatsReport report;
  SimulationResult simulation;
  DerivedTiming timing;
};

// calibrate -> derive timings -> simulate -> finalize. A run that simulates
// no cycles yields the all-zero report.
RunOutput run_experiment(const ExperimentConfig& config, const std::filesystem::path& base_dir = {});
RunOutput run_experiment(const ExperimentConfig& config, const StatsReport& baseline,
                         const std::filesystem::path& base_dir = {});

// report.json, report.csv and (optionally) commands.csv under `dir`.
void write_run_outputs(const RunOutput& run, const std::filesystem::path& dir, bool command_log);

// Declared sweep parameters. segment_length is a bitline-only sweep.
const std::vector<std::string>& sweepable_parameters();
ExperimentConfig with_parameter(const ExperimentConfig& config, std::string_view parameter,
                                const nlohmann::json& value);
std::string parameter_label(const nlohmann::json& value);

struct SweepOutput {
  std::string parameter;
  std::vector<StatsReport> reports;  // in value order
  ComparisonTable table;
};

// One run per value plus conventional baselines, merged in value order.
// Runs execute on up to `jobs` threads.
SweepOutput sweep(const ExperimentConfig& config, std::string_view parameter,
                  const std::vector<nlohmann::json>& values, unsigned jobs = 1,
                  const std::filesystem::path& base_dir = {});

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Reproduction {
  std::string figure;
  std::string csv;
  std::vector<Check> checks;

  bool pass() const noexcept;
};

// Near-length sweep of the bitline model with the trend checks.
Reproduction segment_length_sweep(const bitline::RcNetworkParams& params, int total_cells,
                                  const std::vector<int>& near_lengths);

// fig3 | fig4 | fig8 | table1 on the built-in reference configs.
Reproduction reproduce(std::string_view figure, unsigned jobs = 1);

// Built-in reference configuration: 512-cell bitlines split 32/480, timings
// calibrated on all three published t_rc values, benefit-based caching on a
// Zipf(1.2) synthetic workload.
nlohmann::json reference_config_json();
ExperimentConfig reference_config();

}  // namespace tldram
