#pragma once

#include <cstdint>
#include <vector>

#include "tldram/command_log.hpp"
#include "tldram/controller.hpp"
#include "tldram/core_model.hpp"
#include "tldram/energy.hpp"
#include "tldram/stats.hpp"

namespace tldram {

struct SimulationInput {
  DeviceConfig device;
  PolicyConfig policy;
  ControllerOptions controller;
  EnergyModel energy;
  double non_memory_ipc = 1.0;
  std::vector<std::vector<TraceRecord>> traces;  // one per core
  // Abort when nothing retires or issues for this many consecutive cycles.
  Cycle stall_limit = 1'000'000;
};

struct RequestRecord {
  std::uint64_t id = 0;
  std::uint32_t core_id = 0;
  RequestKind kind = RequestKind::read;
  std::uint64_t address = 0;
  Cycle arrival = 0;
  Cycle completion = 0;
  RowSegment served_from = RowSegment::far;

  friend bool operator==(const RequestRecord&, const RequestRecord&) = default;
};

struct SimulationResult {
  RunCounters counters;
  std::vector<CommandLogEntry> log;
  std::vector<RequestRecord> requests;  // in service order
  std::vector<TransferRecord> transfers;
};

// Runs every core's trace to completion, drains the controller and returns
// raw counters plus the full command log. Requests whose address lies outside
// the device are dropped and counted per core.
SimulationResult simulate(const SimulationInput& input);

}  // namespace tldram
