#pragma once

#include <cstdint>
#include <string_view>

namespace tldram {

using Cycle = std::uint64_t;

// Which latency class a DRAM row belongs to. `baseline` rows only exist in a
// conventional (unsegmented) device.
enum class RowSegment : std::uint8_t { near, far, baseline };

std::string_view to_string(RowSegment s) noexcept;
RowSegment row_segment_from_string(std::string_view s);

// Bank-local row: index counts rows of `segment` across all subarrays of the
// bank, subarray-major (subarray = index / rows-per-subarray-in-segment).
struct RowAddress {
  RowSegment segment = RowSegment::far;
  std::uint32_t index = 0;

  friend bool operator==(const RowAddress&, const RowAddress&) = default;
};

}  // namespace tldram
