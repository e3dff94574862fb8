#include "tldram/audit.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace tldram {

namespace {

struct BankHistory {
  std::optional<CommandLogEntry> last_act;
  std::optional<CommandLogEntry> last_pre;
  std::optional<RowSegment> pre_segment;  // segment of the row the last PRE closed
  bool open = false;
  RowSegment open_segment = RowSegment::far;
  std::uint32_t open_row = 0;
  Cycle transfer_end = 0;
};

RowSegment opposite(RowSegment s) { return s == RowSegment::near ? RowSegment::far : RowSegment::near; }

}  // namespace

AuditReport audit_command_log(std::span<const CommandLogEntry> log, const DeviceConfig& config) {
  AuditReport report;
  report.commands = log.size();
  const TimingTable& t = config.timing;
  std::vector<BankHistory> banks(config.total_banks());
  std::map<std::pair<std::uint32_t, Cycle>, int> channel_use;
  Cycle prev_cycle = 0;

  auto fail = [&report](std::size_t i, std::string rule) { report.violations.push_back({i, std::move(rule)}); };

  for (std::size_t i = 0; i < log.size(); ++i) {
    const CommandLogEntry& e = log[i];
    if (e.cycle < prev_cycle) fail(i, "log not in cycle order");
    prev_cycle = e.cycle;
    if (e.bank >= banks.size()) {
      fail(i, "bank out of range");
      continue;
    }
    BankHistory& b = banks[e.bank];

    if (e.kind != CommandKind::transfer) {
      if (++channel_use[{config.channel_of(e.bank), e.cycle}] > 1) fail(i, "two commands on one channel in a cycle");
    }
    if (e.cycle < b.transfer_end) fail(i, "command to a bank during a transfer");

    switch (e.kind) {
      case CommandKind::act:
        if (b.open) fail(i, "ACT to an open bank");
        if (b.last_pre && e.cycle < b.last_pre->cycle + t.of(*b.pre_segment).t_rp) fail(i, "tRP");
        if (b.last_act && e.cycle < b.last_act->cycle + t.of(b.last_act->segment).t_rc) fail(i, "tRC");
        b.open = true;
        b.open_segment = e.segment;
        b.open_row = e.row;
        b.last_act = e;
        break;
      case CommandKind::pre:
        if (!b.open) {
          fail(i, "PRE to a closed bank");
          break;
        }
        if (e.cycle < b.last_act->cycle + t.of(b.last_act->segment).t_ras) fail(i, "tRAS");
        b.open = false;
        b.last_pre = e;
        b.pre_segment = b.open_segment;
        break;
      case CommandKind::rd:
      case CommandKind::wr:
        if (!b.open || b.open_segment != e.segment || b.open_row != e.row) {
          fail(i, "column access to a row that is not open");
          break;
        }
        if (e.cycle < b.last_act->cycle + t.of(b.last_act->segment).t_rcd) fail(i, "tRCD");
        break;
      case CommandKind::transfer: {
        if (b.open) fail(i, "TRANSFER to an open bank");
        if (b.last_pre && e.cycle < b.last_pre->cycle + t.of(*b.pre_segment).t_rp) fail(i, "tRP before TRANSFER");
        if (e.segment == RowSegment::baseline) fail(i, "TRANSFER in an unsegmented device");
        const RowSegment dst = opposite(e.segment);
        if (e.row / std::max(1u, config.rows_in_subarray(e.segment)) !=
            e.col / std::max(1u, config.rows_in_subarray(dst))) {
          fail(i, "TRANSFER across subarrays");
        }
        b.transfer_end = e.cycle + std::max(t.of(e.segment).t_rc, t.of(dst).t_rc) + t.t_transfer_extra;
        break;
      }
    }
  }
  return report;
}

}  // namespace tldram
