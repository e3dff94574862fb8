#include "tldram/bank.hpp"

#include <string>

#include "tldram/error.hpp"

namespace tldram {

std::string_view to_string(CommandKind k) noexcept {
  switch (k) {
    case CommandKind::act: return "ACT";
    case CommandKind::pre: return "PRE";
    case CommandKind::rd: return "RD";
    case CommandKind::wr: return "WR";
    case CommandKind::transfer: return "TRANSFER";
  }
  return "?";
}

CommandKind command_kind_from_string(std::string_view s) {
  for (auto k : {CommandKind::act, CommandKind::pre, CommandKind::rd, CommandKind::wr, CommandKind::transfer}) {
    if (to_string(k) == s) return k;
  }
  throw ParameterError("unknown command kind '" + std::string(s) + "'");
}

BankState settle(BankState s, Cycle now) noexcept {
  switch (s.status) {
    case BankStatus::activating:
      if (now >= s.earliest_read) {
        s.status = BankStatus::activated;
        s.open_row = s.latched_row;
      }
      break;
    case BankStatus::precharging:
    case BankStatus::transferring:
      if (now >= s.busy_until) s.status = BankStatus::precharged;
      break;
    default:
      break;
  }
  return s;
}

bool can_issue(const BankState& state, const Command& cmd, Cycle now) noexcept {
  const BankState s = settle(state, now);
  switch (cmd.kind) {
    case CommandKind::act:
    case CommandKind::transfer:
      return s.status == BankStatus::precharged;
    case CommandKind::rd:
    case CommandKind::wr:
      return s.status == BankStatus::activated && s.open_row == cmd.row && now >= s.earliest_read;
    case CommandKind::pre:
      return s.status == BankStatus::activated && now >= s.earliest_precharge;
  }
  return false;
}

IssueResult issue(const BankState& state, const Command& cmd, Cycle now, const TimingTable& timing) {
  if (!can_issue(state, cmd, now)) {
    throw ProtocolViolation(std::string(to_string(cmd.kind)) + " not allowed on bank " +
                            std::to_string(cmd.bank) + " at cycle " + std::to_string(now));
  }
  BankState s = settle(state, now);
  IssueResult r;
  switch (cmd.kind) {
    case CommandKind::act: {
      const auto& t = timing.of(cmd.row.segment);
      s.status = BankStatus::activating;
      s.latched_row = cmd.row;
      s.earliest_read = now + t.t_rcd;
      s.earliest_precharge = now + t.t_ras;
      s.busy_until = s.earliest_read;
      r.completion = s.earliest_read;
      break;
    }
    case CommandKind::pre:
      s.status = BankStatus::precharging;
      s.open_row.reset();
      s.busy_until = now + timing.of(s.latched_row.segment).t_rp;
      r.completion = s.busy_until;
      break;
    case CommandKind::rd:
    case CommandKind::wr:
      r.completion = now + timing.cl;
      break;
    case CommandKind::transfer: {
      if (!cmd.transfer_dst) throw ProtocolViolation("TRANSFER without a destination row");
      s.status = BankStatus::transferring;
      s.busy_until = now + timing.transfer_cycles(cmd.row.segment, cmd.transfer_dst->segment);
      r.completion = s.busy_until;
      break;
    }
  }
  r.state = settle(s, now);
  return r;
}

}  // namespace tldram
