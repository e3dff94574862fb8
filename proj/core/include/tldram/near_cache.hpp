#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <string_view>
#include <vector>

#include "tldram/bank.hpp"
#include "tldram/device.hpp"

namespace tldram {

enum class CachePolicy { none, cache_on_access, wait_based, benefit_based, static_map };

std::string_view to_string(CachePolicy p) noexcept;
CachePolicy cache_policy_from_string(std::string_view s);

struct PolicyConfig {
  CachePolicy policy = CachePolicy::benefit_based;
  // Counter units added per access (benefit_based).
  std::uint32_t benefit_increment_hit = 1;
  // Weight each access by the row-cycle cycles a near access saves instead.
  bool benefit_increment_per_saved_cycle = false;
  // wait_based: minimum waited cycles (at least 1). benefit_based: margin a
  // candidate must beat the weakest cached row by.
  std::uint32_t caching_threshold = 0;
  Cycle decay_interval = 10'000;
  // Shadow counters for uncached candidates; 0 means 2 * rows_near.
  std::uint32_t shadow_entries = 0;
  // Bank-local far rows pinned into near slots at start (static_map).
  std::vector<std::uint32_t> static_map_list;

  void validate(const DeviceConfig& device) const;

  friend bool operator==(const PolicyConfig&, const PolicyConfig&) = default;
};

struct NearSlot {
  std::uint32_t far_row = 0;  // bank-local far row index
  bool dirty = false;
  std::uint64_t benefit = 0;
  Cycle last_use = 0;
};

struct ShadowEntry {
  std::uint32_t far_row = 0;
  std::uint64_t benefit = 0;
  Cycle last_use = 0;
};

// Near segment of one subarray used as a cache for that subarray's far rows.
class NearCacheState {
 public:
  NearCacheState() = default;
  NearCacheState(std::uint32_t slots, std::uint32_t shadow_capacity);

  std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(slots_.size()); }
  const std::vector<std::optional<NearSlot>>& slots() const noexcept { return slots_; }
  const std::vector<ShadowEntry>& shadow() const noexcept { return shadow_; }
  std::uint32_t shadow_capacity() const noexcept { return shadow_capacity_; }

  std::optional<std::uint32_t> lookup(std::uint32_t far_row) const noexcept;
  std::optional<std::uint32_t> free_slot() const noexcept;
  bool full() const noexcept { return !free_slot().has_value(); }

  // Benefit of a far row: its slot counter if cached, else its shadow counter.
  std::uint64_t benefit_of(std::uint32_t far_row) const noexcept;

  void install(std::uint32_t slot, std::uint32_t far_row, Cycle now);
  // Empties a slot; its counter moves to the shadow list so the row can
  // compete to return.
  void evict(std::uint32_t slot, Cycle now);
  void touch(std::uint32_t slot, Cycle now, bool write);
  void add_benefit(std::uint32_t far_row, std::uint64_t amount, Cycle now);
  // Integer-halves every counter.
  void decay() noexcept;

  // Test hook: set a cached slot's counter directly.
  void set_slot_benefit(std::uint32_t slot, std::uint64_t benefit);

 private:
  ShadowEntry& shadow_entry(std::uint32_t far_row, Cycle now);

  std::vector<std::optional<NearSlot>> slots_;
  std::unordered_map<std::uint32_t, std::uint32_t> index_;  // far row -> slot
  std::vector<ShadowEntry> shadow_;
  std::uint32_t shadow_capacity_ = 0;
};

struct AccessInfo {
  std::uint32_t far_row = 0;
  bool hit = false;  // served from the near segment
  bool write = false;
  // wait_based: cycles the request waited behind a bank conflict.
  // benefit_based: cycles a near access would save; used as the increment
  // when benefit_increment_per_saved_cycle is set.
  std::uint64_t saved_or_waited_cycles = 0;
  Cycle now = 0;
};

// Updates counters/recency for one served access and returns the far row to
// cache, if the policy decides to cache it. Policies none/static_map never
// change the mapping.
std::optional<std::uint32_t> on_access(NearCacheState& cache, const AccessInfo& access,
                                       const PolicyConfig& policy);

// benefit_based: minimum-benefit slot (lowest index on ties); otherwise the
// least-recently-used slot. Precondition: cache full.
std::uint32_t select_victim(const NearCacheState& cache, const PolicyConfig& policy);

// Whether caching `far_row` is still worthwhile at fill time (benefit_based
// re-checks against the current weakest slot; other policies always fill).
bool fill_still_wanted(const NearCacheState& cache, std::uint32_t far_row, const PolicyConfig& policy);

// Commands moving far_row into victim_slot of the given subarray: a writeback
// TRANSFER near->far first when the victim is dirty, then the fill TRANSFER
// far->near. Indices are converted to bank-local row addresses.
std::vector<Command> cache_fill(const NearCacheState& cache, const DeviceConfig& device, std::uint32_t bank,
                                std::uint32_t subarray, std::uint32_t far_row, std::uint32_t victim_slot);

}  // namespace tldram
