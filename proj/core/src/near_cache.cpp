#include "tldram/near_cache.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "tldram/error.hpp"

namespace tldram {

std::string_view to_string(CachePolicy p) noexcept {
  switch (p) {
    case CachePolicy::none: return "none";
    case CachePolicy::cache_on_access: return "cache_on_access";
    case CachePolicy::wait_based: return "wait_based";
    case CachePolicy::benefit_based: return "benefit_based";
    case CachePolicy::static_map: return "static_map";
  }
  return "?";
}

CachePolicy cache_policy_from_string(std::string_view s) {
  for (auto p : {CachePolicy::none, CachePolicy::cache_on_access, CachePolicy::wait_based,
                 CachePolicy::benefit_based, CachePolicy::static_map}) {
    if (to_string(p) == s) return p;
  }
  throw ParameterError("unknown cache policy '" + std::string(s) + "'");
}

void PolicyConfig::validate(const DeviceConfig& device) const {
  if (decay_interval < 1) throw ParameterError("decay_interval must be >= 1 cycle");
  if (policy != CachePolicy::none && device.mode == DeviceMode::conventional) {
    throw ParameterError("near-segment policies need a tldram device");
  }
  std::set<std::uint32_t> seen;
  std::vector<std::uint32_t> per_subarray(device.subarrays_per_bank, 0);
  for (auto row : static_map_list) {
    if (!seen.insert(row).second) throw ParameterError("static_map_list entries must be distinct");
    if (row >= device.rows_in_bank(RowSegment::far)) throw ParameterError("static_map_list row out of range");
    if (++per_subarray[row / device.rows_far] > device.rows_near) {
      throw ParameterError("static_map_list pins more rows than a subarray has near slots");
    }
  }
}

NearCacheState::NearCacheState(std::uint32_t slots, std::uint32_t shadow_capacity)
    : slots_(slots), shadow_capacity_(shadow_capacity) {}

std::optional<std::uint32_t> NearCacheState::lookup(std::uint32_t far_row) const noexcept {
  const auto it = index_.find(far_row);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> NearCacheState::free_slot() const noexcept {
  for (std::uint32_t i = 0; i < slots_.size(); ++i) {
    if (!slots_[i]) return i;
  }
  return std::nullopt;
}

std::uint64_t NearCacheState::benefit_of(std::uint32_t far_row) const noexcept {
  if (auto s = lookup(far_row)) return slots_[*s]->benefit;
  for (const auto& e : shadow_) {
    if (e.far_row == far_row) return e.benefit;
  }
  return 0;
}

ShadowEntry& NearCacheState::shadow_entry(std::uint32_t far_row, Cycle now) {
  for (auto& e : shadow_) {
    if (e.far_row == far_row) return e;
  }
  if (shadow_.size() < shadow_capacity_ || shadow_.empty()) {
    shadow_.push_back({far_row, 0, now});
    return shadow_.back();
  }
  auto lru = std::min_element(shadow_.begin(), shadow_.end(),
                              [](const ShadowEntry& a, const ShadowEntry& b) { return a.last_use < b.last_use; });
  *lru = {far_row, 0, now};
  return *lru;
}

void NearCacheState::install(std::uint32_t slot, std::uint32_t far_row, Cycle now) {
  if (slot >= slots_.size() || slots_[slot]) throw ParameterError("install into an occupied or invalid slot");
  if (lookup(far_row)) throw ParameterError("far row already cached");
  NearSlot s{far_row, false, 0, now};
  auto it = std::find_if(shadow_.begin(), shadow_.end(), [far_row](const ShadowEntry& e) { return e.far_row == far_row; });
  if (it != shadow_.end()) {
    s.benefit = it->benefit;
    shadow_.erase(it);
  }
  slots_[slot] = s;
  index_[far_row] = slot;
}

void NearCacheState::evict(std::uint32_t slot, Cycle now) {
  if (slot >= slots_.size() || !slots_[slot]) throw ParameterError("evict from an empty or invalid slot");
  const NearSlot s = *slots_[slot];
  slots_[slot].reset();
  index_.erase(s.far_row);
  if (shadow_capacity_ > 0) {
    ShadowEntry& e = shadow_entry(s.far_row, now);
    e.benefit = s.benefit;
    e.last_use = s.last_use;
  }
}

void NearCacheState::touch(std::uint32_t slot, Cycle now, bool write) {
  auto& s = slots_.at(slot);
  if (!s) throw ParameterError("touch of an empty slot");
  s->last_use = now;
  s->dirty = s->dirty || write;
}

void NearCacheState::add_benefit(std::uint32_t far_row, std::uint64_t amount, Cycle now) {
  if (auto s = lookup(far_row)) {
    slots_[*s]->benefit += amount;
    return;
  }
  if (shadow_capacity_ == 0) return;
  ShadowEntry& e = shadow_entry(far_row, now);
  e.benefit += amount;
  e.last_use = now;
}

void NearCacheState::decay() noexcept {
  for (auto& s : slots_) {
    if (s) s->benefit /= 2;
  }
  for (auto& e : shadow_) e.benefit /= 2;
}

void NearCacheState::set_slot_benefit(std::uint32_t slot, std::uint64_t benefit) {
  auto& s = slots_.at(slot);
  if (!s) throw ParameterError("set_slot_benefit on an empty slot");
  s->benefit = benefit;
}

namespace {

std::uint64_t weakest_benefit(const NearCacheState& cache) {
  std::uint64_t m = ~std::uint64_t{0};
  for (const auto& s : cache.slots()) {
    if (s) m = std::min(m, s->benefit);
  }
  return m;
}

}  // namespace

std::optional<std::uint32_t> on_access(NearCacheState& cache, const AccessInfo& access,
                                       const PolicyConfig& policy) {
  const auto slot = cache.lookup(access.far_row);
  if (slot) cache.touch(*slot, access.now, access.write);

  switch (policy.policy) {
    case CachePolicy::none:
    case CachePolicy::static_map:
      return std::nullopt;
    case CachePolicy::cache_on_access:
      if (slot) return std::nullopt;
      return access.far_row;
    case CachePolicy::wait_based:
      if (slot) return std::nullopt;
      if (access.saved_or_waited_cycles >= std::max<std::uint64_t>(1, policy.caching_threshold)) {
        return access.far_row;
      }
      return std::nullopt;
    case CachePolicy::benefit_based: {
      const std::uint64_t inc =
          policy.benefit_increment_per_saved_cycle ? access.saved_or_waited_cycles : policy.benefit_increment_hit;
      cache.add_benefit(access.far_row, inc, access.now);
      if (slot) return std::nullopt;
      if (fill_still_wanted(cache, access.far_row, policy)) return access.far_row;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::uint32_t select_victim(const NearCacheState& cache, const PolicyConfig& policy) {
  const auto& slots = cache.slots();
  if (slots.empty()) throw ParameterError("select_victim on an empty cache");
  std::uint32_t best = 0;
  bool found = false;
  for (std::uint32_t i = 0; i < slots.size(); ++i) {
    if (!slots[i]) continue;
    if (!found) {
      best = i;
      found = true;
      continue;
    }
    const auto& cur = *slots[i];
    const auto& b = *slots[best];
    const bool better = policy.policy == CachePolicy::benefit_based ? cur.benefit < b.benefit
                                                                    : cur.last_use < b.last_use;
    if (better) best = i;
  }
  if (!found) throw ParameterError("select_victim with no occupied slot");
  return best;
}

bool fill_still_wanted(const NearCacheState& cache, std::uint32_t far_row, const PolicyConfig& policy) {
  if (cache.lookup(far_row) || cache.size() == 0) return false;
  if (policy.policy != CachePolicy::benefit_based) return true;
  if (cache.free_slot()) return true;
  return cache.benefit_of(far_row) > weakest_benefit(cache) + policy.caching_threshold;
}

std::vector<Command> cache_fill(const NearCacheState& cache, const DeviceConfig& device, std::uint32_t bank,
                                std::uint32_t subarray, std::uint32_t far_row, std::uint32_t victim_slot) {
  const RowAddress near{RowSegment::near, subarray * device.rows_near + victim_slot};
  std::vector<Command> cmds;
  const auto& victim = cache.slots().at(victim_slot);
  if (victim && victim->dirty) {
    cmds.push_back({CommandKind::transfer, bank, near, 0, RowAddress{RowSegment::far, victim->far_row}});
  }
  cmds.push_back({CommandKind::transfer, bank, RowAddress{RowSegment::far, far_row}, 0, near});
  return cmds;
}

}  // namespace tldram
