#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tldram/command_log.hpp"
#include "tldram/device.hpp"

namespace tldram {

struct AuditViolation {
  std::size_t entry = 0;  // index into the replayed log
  std::string rule;
};

struct AuditReport {
  std::size_t commands = 0;
  std::vector<AuditViolation> violations;

  bool ok() const noexcept { return violations.empty(); }
};

// Replays a command log against the raw timing rules (ACT->RD >= tRCD,
// ACT->PRE >= tRAS, PRE->ACT >= tRP, ACT->ACT >= tRC, transfer occupancy,
// one channel command per cycle). Shares no state machine code with the
// device model.
AuditReport audit_command_log(std::span<const CommandLogEntry> log, const DeviceConfig& config);

}  // namespace tldram
