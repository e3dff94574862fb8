#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "tldram/timing.hpp"
#include "tldram/types.hpp"

namespace tldram {

enum class BankStatus { precharged, activating, activated, precharging, transferring };

enum class CommandKind : std::uint8_t { act, pre, rd, wr, transfer };

std::string_view to_string(CommandKind k) noexcept;
CommandKind command_kind_from_string(std::string_view s);

struct Command {
  CommandKind kind = CommandKind::act;
  std::uint32_t bank = 0;
  RowAddress row;  // TRANSFER: source row
  std::uint32_t column = 0;
  std::optional<RowAddress> transfer_dst;

  friend bool operator==(const Command&, const Command&) = default;
};

struct BankState {
  BankStatus status = BankStatus::precharged;
  std::optional<RowAddress> open_row;  // present iff status == activated
  RowAddress latched_row;              // row most recently activated
  Cycle busy_until = 0;
  Cycle earliest_read = 0;
  Cycle earliest_precharge = 0;

  friend bool operator==(const BankState&, const BankState&) = default;
};

// Advances time-driven transitions (activating -> activated, precharging or
// transferring -> precharged) up to `now`.
BankState settle(BankState s, Cycle now) noexcept;

// Pure FSM predicate; settles the state first.
bool can_issue(const BankState& state, const Command& cmd, Cycle now) noexcept;

struct IssueResult {
  BankState state;
  Cycle completion = 0;  // data ready (RD/WR), row sensed (ACT), bank free (PRE/TRANSFER)
};

// Throws ProtocolViolation when can_issue() is false.
IssueResult issue(const BankState& state, const Command& cmd, Cycle now, const TimingTable& timing);

}  // namespace tldram
