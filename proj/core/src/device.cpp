#include "tldram/device.hpp"

#include <string>

#include "tldram/error.hpp"

namespace tldram {

std::string_view to_string(DeviceMode m) noexcept {
  return m == DeviceMode::tldram ? "tldram" : "conventional";
}

DeviceMode device_mode_from_string(std::string_view s) {
  if (s == "tldram") return DeviceMode::tldram;
  if (s == "conventional") return DeviceMode::conventional;
  throw ParameterError("unknown device mode '" + std::string(s) + "'");
}

std::uint32_t DeviceConfig::rows_in_subarray(RowSegment s) const noexcept {
  switch (s) {
    case RowSegment::near: return mode == DeviceMode::tldram ? rows_near : 0;
    case RowSegment::far: return mode == DeviceMode::tldram ? rows_far : 0;
    case RowSegment::baseline: return mode == DeviceMode::conventional ? rows_near + rows_far : 0;
  }
  return 0;
}

bool DeviceConfig::valid_row(const RowAddress& r) const noexcept {
  return r.index < rows_in_bank(r.segment);
}

void DeviceConfig::validate() const {
  if (channels < 1 || ranks_per_channel < 1 || banks_per_rank < 1 || subarrays_per_bank < 1 ||
      rows_far < 1 || columns_per_row < 1) {
    throw ParameterError("device counts must be >= 1");
  }
  if (mode == DeviceMode::tldram && rows_near < 1) {
    throw ParameterError("rows_near must be >= 1 in tldram mode");
  }
  if (!(t_ck_ns > 0.0)) throw ParameterError("t_ck must be positive");
  timing.validate();
}

void check_transfer(const DeviceConfig& cfg, const RowAddress& src, const RowAddress& dst) {
  if (cfg.mode != DeviceMode::tldram || src.segment == RowSegment::baseline ||
      dst.segment == RowSegment::baseline) {
    throw UnsupportedOperation("inter-segment transfer requires a segmented (tldram) device");
  }
  if (src.segment == dst.segment) {
    throw UnsupportedOperation("transfer source and destination must be in different segments");
  }
  if (!cfg.valid_row(src) || !cfg.valid_row(dst)) {
    throw UnsupportedOperation("transfer row out of range");
  }
  if (cfg.subarray_of(src) != cfg.subarray_of(dst)) {
    throw UnsupportedOperation("transfer across subarrays (" + std::to_string(cfg.subarray_of(src)) + " -> " +
                               std::to_string(cfg.subarray_of(dst)) + ") is not supported");
  }
}

DramDevice::DramDevice(DeviceConfig config) : config_(std::move(config)) {
  config_.validate();
  banks_.resize(config_.total_banks());
  channel_last_cmd_.assign(config_.channels, 0);

  const std::size_t per_bank = config_.rows_in_bank(RowSegment::near) + config_.rows_in_bank(RowSegment::far) +
                               config_.rows_in_bank(RowSegment::baseline);
  tags_.assign(per_bank * banks_.size(), kEmptyTag);
  for (std::uint32_t b = 0; b < banks_.size(); ++b) {
    for (auto seg : {RowSegment::far, RowSegment::baseline}) {
      for (std::uint32_t i = 0; i < config_.rows_in_bank(seg); ++i) {
        tags_[tag_index(b, {seg, i})] = (static_cast<RowTag>(b) << 32) | i;
      }
    }
  }
}

std::size_t DramDevice::tag_index(std::uint32_t bank, const RowAddress& row) const {
  const std::size_t near = config_.rows_in_bank(RowSegment::near);
  const std::size_t far = config_.rows_in_bank(RowSegment::far);
  const std::size_t per_bank = near + far + config_.rows_in_bank(RowSegment::baseline);
  std::size_t offset = 0;
  switch (row.segment) {
    case RowSegment::near: offset = 0; break;
    case RowSegment::far: offset = near; break;
    case RowSegment::baseline: offset = near + far; break;
  }
  return bank * per_bank + offset + row.index;
}

void DramDevice::check_command(const Command& cmd) const {
  if (cmd.bank >= banks_.size()) throw ProtocolViolation("bank " + std::to_string(cmd.bank) + " out of range");
  if (!config_.valid_row(cmd.row)) {
    throw ProtocolViolation("row " + std::to_string(cmd.row.index) + " in segment " +
                            std::string(to_string(cmd.row.segment)) + " out of range");
  }
  if ((cmd.kind == CommandKind::rd || cmd.kind == CommandKind::wr) && cmd.column >= config_.columns_per_row) {
    throw ProtocolViolation("column out of range");
  }
}

BankState DramDevice::bank(std::uint32_t b, Cycle now) const { return settle(banks_.at(b), now); }

bool DramDevice::channel_busy(std::uint32_t channel, Cycle now) const {
  return channel_last_cmd_.at(channel) == now + 1;
}

bool DramDevice::can_issue(const Command& cmd, Cycle now) const {
  if (cmd.bank >= banks_.size() || !config_.valid_row(cmd.row)) return false;
  if (cmd.kind != CommandKind::transfer && channel_busy(config_.channel_of(cmd.bank), now)) return false;
  return tldram::can_issue(banks_[cmd.bank], cmd, now);
}

Cycle DramDevice::issue(const Command& cmd, Cycle now) {
  check_command(cmd);
  const std::uint32_t channel = config_.channel_of(cmd.bank);
  if (cmd.kind == CommandKind::transfer) {
    if (!cmd.transfer_dst) throw ProtocolViolation("TRANSFER without a destination row");
    check_transfer(config_, cmd.row, *cmd.transfer_dst);
  } else if (channel_busy(channel, now)) {
    throw ProtocolViolation("second command on channel " + std::to_string(channel) + " in cycle " +
                            std::to_string(now));
  }

  const IssueResult r = tldram::issue(banks_[cmd.bank], cmd, now, config_.timing);
  banks_[cmd.bank] = r.state;

  CommandLogEntry e{now, cmd.bank, cmd.kind, cmd.row.segment, cmd.row.index, 0};
  switch (cmd.kind) {
    case CommandKind::transfer: {
      const RowTag t = tags_[tag_index(cmd.bank, cmd.row)];
      tags_[tag_index(cmd.bank, *cmd.transfer_dst)] = t;
      transfers_.push_back({cmd.bank, cmd.row, *cmd.transfer_dst, t});
      e.col = cmd.transfer_dst->index;
      break;
    }
    case CommandKind::rd:
    case CommandKind::wr:
      e.col = cmd.column;
      [[fallthrough]];
    default:
      channel_last_cmd_[channel] = now + 1;
      break;
  }
  log_.push_back(e);
  return r.completion;
}

RowTag DramDevice::tag(std::uint32_t bank, const RowAddress& row) const {
  if (bank >= banks_.size() || !config_.valid_row(row)) throw ParameterError("tag lookup out of range");
  return tags_[tag_index(bank, row)];
}

}  // namespace tldram
