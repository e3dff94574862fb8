#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tldram/calibration.hpp"
#include "tldram/controller.hpp"
#include "tldram/energy.hpp"
#include "tldram/near_cache.hpp"
#include "tldram/trace.hpp"

namespace tldram {

struct DeviceSection {
  DeviceMode mode = DeviceMode::tldram;
  std::uint32_t channels = 1;
  std::uint32_t ranks_per_channel = 1;
  std::uint32_t banks_per_rank = 8;
  std::uint32_t subarrays_per_bank = 1;
  int cells_per_bitline = 512;
  std::uint32_t rows_near = 32;
  std::uint32_t columns_per_row = 128;
  double t_ck_ns = 1.25;
  double cl_ns = 13.75;
  double transfer_extra_ns = 4.0;
  // Give near and far rows the unsegmented bitline's timings.
  bool uniform_baseline_timing = false;
  // Near-segment timing from a bitline of cells_per_bitline cells split at
  // rows_near (true) or fixed at the 32-cell split (false).
  bool length_dependent_timing = true;
  std::uint32_t queue_capacity = 32;
  std::uint32_t max_pending_fills = 4;
  Cycle epoch_length = 100'000;

  friend bool operator==(const DeviceSection&, const DeviceSection&) = default;
};

struct RcSection {
  // Exactly one of params / anchors.
  std::optional<bitline::RcNetworkParams> params;
  std::optional<std::vector<bitline::CalibrationAnchor>> anchors;
  std::vector<bitline::FreeParam> free = {bitline::FreeParam::c_cell, bitline::FreeParam::r_drive,
                                          bitline::FreeParam::r_iso};
  bitline::RcNetworkParams initial;  // starting point and fixed values for calibration

  friend bool operator==(const RcSection&, const RcSection&) = default;
};

struct SyntheticSection {
  std::uint64_t request_count = 100'000;
  double zipf_exponent = 1.2;
  std::uint64_t working_set_rows = 4096;
  double read_fraction = 0.7;
  double mean_gap = 20.0;

  friend bool operator==(const SyntheticSection&, const SyntheticSection&) = default;
};

struct WorkloadSection {
  // Exactly one of traces / synthetic. A single trace is replayed by every
  // core; otherwise one trace per core.
  std::vector<std::string> traces;
  std::optional<SyntheticSection> synthetic;

  friend bool operator==(const WorkloadSection&, const WorkloadSection&) = default;
};

struct OutputSection {
  std::string dir = "out";
  bool command_log = true;

  friend bool operator==(const OutputSection&, const OutputSection&) = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  DeviceSection device;
  RcSection rc;
  PolicyConfig policy;
  EnergyModel energy;
  WorkloadSection workload;
  std::uint32_t cores = 1;
  double non_memory_ipc = 1.0;
  std::uint64_t seed = 1;
  OutputSection output;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Strict parse: unknown keys, wrong types and violated invariants raise
// ConfigError naming the JSON-pointer path of the field.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json load_config_json(const std::filesystem::path& path);

// Normalized form: every field explicit.
nlohmann::json to_json(const ExperimentConfig& c);

// `key=value` where key is a dotted path (device.rows_near) or a JSON pointer
// (/device/rows_near); value is JSON, or a bare string when it does not parse.
void apply_override(nlohmann::json& j, std::string_view assignment);

}  // namespace tldram
