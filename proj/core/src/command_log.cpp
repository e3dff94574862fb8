#include "tldram/command_log.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "tldram/error.hpp"

namespace tldram {

namespace {

template <typename T>
T parse_number(std::string_view field, std::string_view line) {
  T value{};
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParameterError("bad number '" + std::string(field) + "' in command log line '" + std::string(line) + "'");
  }
  return value;
}

}  // namespace

std::string format_command_log_line(const CommandLogEntry& e) {
  std::string s = std::to_string(e.cycle);
  s += ',';
  s += std::to_string(e.bank);
  s += ',';
  s += to_string(e.kind);
  s += ',';
  s += to_string(e.segment);
  s += ',';
  s += std::to_string(e.row);
  s += ',';
  s += std::to_string(e.col);
  return s;
}

CommandLogEntry parse_command_log_line(std::string_view line) {
  std::string_view fields[6];
  std::size_t n = 0;
  std::string_view rest = line;
  while (n < 6) {
    const auto comma = rest.find(',');
    fields[n++] = rest.substr(0, comma);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (n != 6 || rest.find(',') != std::string_view::npos) {
    throw ParameterError("command log line needs 6 fields: '" + std::string(line) + "'");
  }
  CommandLogEntry e;
  e.cycle = parse_number<Cycle>(fields[0], line);
  e.bank = parse_number<std::uint32_t>(fields[1], line);
  e.kind = command_kind_from_string(fields[2]);
  e.segment = row_segment_from_string(fields[3]);
  e.row = parse_number<std::uint32_t>(fields[4], line);
  e.col = parse_number<std::uint32_t>(fields[5], line);
  return e;
}

void write_command_log(std::ostream& out, std::span<const CommandLogEntry> entries) {
  out << kCommandLogHeader << '\n';
  for (const auto& e : entries) out << format_command_log_line(e) << '\n';
}

std::vector<CommandLogEntry> read_command_log(std::istream& in) {
  std::vector<CommandLogEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line == kCommandLogHeader) continue;
    out.push_back(parse_command_log_line(line));
  }
  return out;
}

}  // namespace tldram
