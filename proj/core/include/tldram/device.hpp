#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "tldram/bank.hpp"
#include "tldram/command_log.hpp"
#include "tldram/timing.hpp"

namespace tldram {

enum class DeviceMode { tldram, conventional };

std::string_view to_string(DeviceMode m) noexcept;
DeviceMode device_mode_from_string(std::string_view s);

struct DeviceConfig {
  std::uint32_t channels = 1;
  std::uint32_t ranks_per_channel = 1;
  std::uint32_t banks_per_rank = 8;
  std::uint32_t subarrays_per_bank = 1;
  std::uint32_t rows_near = 32;  // per subarray
  std::uint32_t rows_far = 480;  // per subarray
  std::uint32_t columns_per_row = 128;
  double t_ck_ns = 1.25;
  TimingTable timing;
  DeviceMode mode = DeviceMode::tldram;

  std::uint32_t total_banks() const noexcept { return channels * ranks_per_channel * banks_per_rank; }
  std::uint32_t banks_per_channel() const noexcept { return ranks_per_channel * banks_per_rank; }
  std::uint32_t channel_of(std::uint32_t bank) const noexcept { return bank / banks_per_channel(); }

  // Rows of `s` in one subarray. Conventional devices expose rows_near +
  // rows_far unsegmented rows per subarray.
  std::uint32_t rows_in_subarray(RowSegment s) const noexcept;
  std::uint32_t rows_in_bank(RowSegment s) const noexcept { return rows_in_subarray(s) * subarrays_per_bank; }
  std::uint32_t subarray_of(const RowAddress& r) const noexcept { return r.index / rows_in_subarray(r.segment); }

  // The segment a request-visible row lives in: far (TL-DRAM) or baseline.
  RowSegment visible_segment() const noexcept {
    return mode == DeviceMode::tldram ? RowSegment::far : RowSegment::baseline;
  }

  bool valid_row(const RowAddress& r) const noexcept;
  void validate() const;
};

// Identity of the data held by a row. Rows start out holding their own
// identity; near slots start empty.
using RowTag = std::uint64_t;
inline constexpr RowTag kEmptyTag = ~RowTag{0};

struct TransferRecord {
  std::uint32_t bank = 0;
  RowAddress src;
  RowAddress dst;
  RowTag tag = kEmptyTag;
};

// Validates that src -> dst is an in-subarray, cross-segment copy. Throws
// UnsupportedOperation otherwise.
void check_transfer(const DeviceConfig& cfg, const RowAddress& src, const RowAddress& dst);

// All banks of all channels. Owns the bank FSMs, the row-identity tags and the
// command log. Every issued command is appended to the log in issue order.
class DramDevice {
 public:
  explicit DramDevice(DeviceConfig config);

  const DeviceConfig& config() const noexcept { return config_; }
  const TimingTable& timing() const noexcept { return config_.timing; }

  BankState bank(std::uint32_t b, Cycle now) const;
  bool can_issue(const Command& cmd, Cycle now) const;

  // Issues cmd (ProtocolViolation if illegal). TRANSFER does not use the
  // channel; every other command claims the channel's command slot for the
  // cycle. Returns the completion cycle.
  Cycle issue(const Command& cmd, Cycle now);

  // Whether the channel already carried a command this cycle.
  bool channel_busy(std::uint32_t channel, Cycle now) const;

  RowTag tag(std::uint32_t bank, const RowAddress& row) const;
  const std::vector<TransferRecord>& transfers() const noexcept { return transfers_; }
  const std::vector<CommandLogEntry>& log() const noexcept { return log_; }

 private:
  std::size_t tag_index(std::uint32_t bank, const RowAddress& row) const;
  void check_command(const Command& cmd) const;

  DeviceConfig config_;
  std::vector<BankState> banks_;
  std::vector<RowTag> tags_;
  std::vector<Cycle> channel_last_cmd_;  // cycle + 1 of the last channel command, 0 = none
  std::vector<TransferRecord> transfers_;
  std::vector<CommandLogEntry> log_;
};

}  // namespace tldram
