#pragma once

#include <cstdint>

#include "tldram/bitline.hpp"
#include "tldram/types.hpp"

namespace tldram {

struct TimingCycles {
  std::uint32_t t_rcd = 1;
  std::uint32_t t_ras = 1;
  std::uint32_t t_rp = 1;
  std::uint32_t t_rc = 1;

  friend bool operator==(const TimingCycles&, const TimingCycles&) = default;
};

struct TimingTable {
  TimingCycles near;
  TimingCycles far;
  TimingCycles baseline;
  std::uint32_t cl = 1;
  std::uint32_t t_transfer_extra = 1;

  const TimingCycles& of(RowSegment s) const noexcept;

  // Bank occupancy of an inter-segment transfer: the larger row-cycle time of
  // the two segments plus the fixed transfer overhead.
  std::uint32_t transfer_cycles(RowSegment src, RowSegment dst) const noexcept;

  void validate() const;

  friend bool operator==(const TimingTable&, const TimingTable&) = default;
};

// ceil(ns / t_ck), at least one cycle.
std::uint32_t to_cycles(double ns, double t_ck_ns);
TimingCycles to_cycles(const bitline::LatencyProfile& p, double t_ck_ns);

inline constexpr double kTransferExtraNs = 4.0;

TimingTable make_timing_table(const bitline::LatencyProfile& near, const bitline::LatencyProfile& far,
                              const bitline::LatencyProfile& baseline, double cl_ns, double t_ck_ns,
                              double transfer_extra_ns = kTransferExtraNs);

}  // namespace tldram
