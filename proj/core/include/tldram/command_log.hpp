#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tldram/bank.hpp"

namespace tldram {

// One line per command: `cycle,bank,kind,segment,row,col`.
// For TRANSFER, segment/row name the source and col holds the destination row
// index; the destination segment is the opposite one.
struct CommandLogEntry {
  Cycle cycle = 0;
  std::uint32_t bank = 0;
  CommandKind kind = CommandKind::act;
  RowSegment segment = RowSegment::far;
  std::uint32_t row = 0;
  std::uint32_t col = 0;

  friend bool operator==(const CommandLogEntry&, const CommandLogEntry&) = default;
};

inline constexpr std::string_view kCommandLogHeader = "cycle,bank,kind,segment,row,col";

std::string format_command_log_line(const CommandLogEntry& e);
CommandLogEntry parse_command_log_line(std::string_view line);

void write_command_log(std::ostream& out, std::span<const CommandLogEntry> entries);
// Skips the header and blank lines. Throws ParameterError on malformed lines.
std::vector<CommandLogEntry> read_command_log(std::istream& in);

}  // namespace tldram
