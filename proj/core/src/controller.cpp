#include "tldram/controller.hpp"

#include <algorithm>
#include <string>

#include "tldram/error.hpp"

namespace tldram {

AddressMapper::AddressMapper(const DeviceConfig& config)
    : banks_(config.total_banks()),
      banks_per_channel_(config.banks_per_channel()),
      subarrays_(config.subarrays_per_bank),
      rows_per_subarray_(config.rows_in_subarray(config.visible_segment())),
      columns_(config.columns_per_row) {}

std::uint64_t AddressMapper::capacity_rows() const noexcept {
  return std::uint64_t{banks_} * subarrays_ * rows_per_subarray_;
}

DecodedAddress AddressMapper::decode(std::uint64_t address) const {
  const std::uint64_t line = address / kLineBytes;
  const std::uint64_t id = line / columns_;
  if (id >= capacity_rows()) {
    throw RequestError("address " + std::to_string(address) + " beyond device capacity");
  }
  DecodedAddress d;
  d.column = static_cast<std::uint32_t>(line % columns_);
  d.bank = static_cast<std::uint32_t>(id % banks_);
  const std::uint64_t rest = id / banks_;
  const auto subarray = static_cast<std::uint32_t>(rest % subarrays_);
  d.row = subarray * rows_per_subarray_ + static_cast<std::uint32_t>(rest / subarrays_);
  d.channel = d.bank / banks_per_channel_;
  return d;
}

std::uint64_t AddressMapper::row_id(const DecodedAddress& d) const noexcept {
  const std::uint64_t subarray = d.row / rows_per_subarray_;
  const std::uint64_t r = d.row % rows_per_subarray_;
  return (r * subarrays_ + subarray) * banks_ + d.bank;
}

std::uint64_t AddressMapper::address_of_row(std::uint64_t id, std::uint32_t column) const {
  if (id >= capacity_rows()) throw RequestError("row id " + std::to_string(id) + " beyond device capacity");
  if (column >= columns_) throw RequestError("column out of range");
  return (id * columns_ + column) * kLineBytes;
}

std::uint64_t AddressMapper::encode(const DecodedAddress& d) const { return address_of_row(row_id(d), d.column); }

RowAddress translate(const DeviceConfig& device, const PolicyConfig& policy, const NearCacheState& cache,
                     std::uint32_t visible_row) {
  if (device.mode == DeviceMode::conventional) return {RowSegment::baseline, visible_row};
  if (policy.policy != CachePolicy::none) {
    if (auto slot = cache.lookup(visible_row)) {
      const std::uint32_t subarray = visible_row / device.rows_far;
      return {RowSegment::near, subarray * device.rows_near + *slot};
    }
  }
  return {RowSegment::far, visible_row};
}

Controller::Controller(DramDevice& device, PolicyConfig policy, ControllerOptions options)
    : device_(device), policy_(std::move(policy)), options_(options), mapper_(device.config()) {
  const auto& cfg = device_.config();
  policy_.validate(cfg);
  if (options_.queue_capacity < 1) throw ParameterError("queue_capacity must be >= 1");
  queues_.resize(cfg.channels);
  work_.resize(cfg.total_banks());
  if (cfg.mode == DeviceMode::tldram) {
    const std::uint32_t shadow = policy_.shadow_entries > 0 ? policy_.shadow_entries : 2 * cfg.rows_near;
    caches_.assign(std::size_t{cfg.total_banks()} * cfg.subarrays_per_bank, NearCacheState(cfg.rows_near, shadow));
  }
  if (policy_.policy == CachePolicy::static_map) {
    for (std::uint32_t b = 0; b < cfg.total_banks(); ++b) {
      std::vector<std::uint32_t> next_slot(cfg.subarrays_per_bank, 0);
      for (std::uint32_t row : policy_.static_map_list) {
        const std::uint32_t sub = row / cfg.rows_far;
        const std::uint32_t slot = next_slot[sub]++;
        const RowAddress near{RowSegment::near, sub * cfg.rows_near + slot};
        work_[b].steps.push_back(
            {Command{CommandKind::transfer, b, RowAddress{RowSegment::far, row}, 0, near}, sub, slot, row, false});
      }
    }
  }
}

NearCacheState& Controller::cache_mut(std::uint32_t bank, std::uint32_t subarray) {
  return caches_.at(std::size_t{bank} * device_.config().subarrays_per_bank + subarray);
}

const NearCacheState& Controller::cache(std::uint32_t bank, std::uint32_t subarray) const {
  if (caches_.empty()) throw UnsupportedOperation("conventional devices have no near segment");
  return caches_.at(std::size_t{bank} * device_.config().subarrays_per_bank + subarray);
}

RowAddress Controller::translate(std::uint32_t bank, std::uint32_t visible_row) const {
  const auto& cfg = device_.config();
  if (cfg.mode == DeviceMode::conventional) return {RowSegment::baseline, visible_row};
  return tldram::translate(cfg, policy_, cache(bank, visible_row / cfg.rows_far), visible_row);
}

bool Controller::can_accept(std::uint32_t channel) const noexcept {
  return channel < queues_.size() && queues_[channel].size() < options_.queue_capacity;
}

void Controller::enqueue(const Request& request, Cycle now) {
  const DecodedAddress addr = mapper_.decode(request.address);
  if (!can_accept(addr.channel)) throw RequestError("request queue full");
  Pending p{request, addr, false, std::nullopt, 0};
  const BankState b = device_.bank(addr.bank, now);
  const RowAddress target = translate(addr.bank, addr.row);
  switch (b.status) {
    case BankStatus::precharged: break;
    case BankStatus::activating:
    case BankStatus::activated: p.conflicted = !(b.latched_row == target); break;
    case BankStatus::precharging:
    case BankStatus::transferring: p.conflicted = true; break;
  }
  queues_[addr.channel].push_back(p);
}

std::optional<Command> Controller::next_command(const Pending& p, Cycle now) const {
  const RowAddress target = translate(p.addr.bank, p.addr.row);
  const BankState b = device_.bank(p.addr.bank, now);
  switch (b.status) {
    case BankStatus::precharged:
      return Command{CommandKind::act, p.addr.bank, target, 0, std::nullopt};
    case BankStatus::activated:
      if (b.open_row == target) {
        const auto kind = p.request.kind == RequestKind::read ? CommandKind::rd : CommandKind::wr;
        return Command{kind, p.addr.bank, target, p.addr.column, std::nullopt};
      }
      return Command{CommandKind::pre, p.addr.bank, b.latched_row, 0, std::nullopt};
    default:
      return std::nullopt;
  }
}

std::optional<Controller::Choice> Controller::choose(std::uint32_t channel, Cycle now) const {
  const auto& q = queues_.at(channel);
  const Pending* starving = nullptr;
  for (const auto& p : q) {
    if (p.bypassed >= options_.queue_capacity) {
      starving = &p;
      break;
    }
  }

  std::optional<Choice> hit;
  std::optional<Choice> other;
  for (std::size_t i = 0; i < q.size() && !hit; ++i) {
    const Pending& p = q[i];
    auto cmd = next_command(p, now);
    if (!cmd || !device_.can_issue(*cmd, now)) continue;
    if (cmd->kind == CommandKind::rd || cmd->kind == CommandKind::wr) {
      if (starving && starving != &p && starving->addr.bank == p.addr.bank) continue;
      hit = Choice{*cmd, i};
    } else if (!other) {
      // Fill work on a precharged bank goes before any new activation.
      if (cmd->kind == CommandKind::act && work_[p.addr.bank].has_work()) continue;
      other = Choice{*cmd, i};
    }
  }
  if (hit) return hit;

  // Close a row so pending fills can run, unless a queued request still hits it.
  const auto& cfg = device_.config();
  const std::uint32_t first = channel * cfg.banks_per_channel();
  for (std::uint32_t b = first; b < first + cfg.banks_per_channel(); ++b) {
    if (!work_[b].has_work()) continue;
    const BankState s = device_.bank(b, now);
    if (s.status != BankStatus::activated) continue;
    const bool wanted = std::any_of(q.begin(), q.end(), [&](const Pending& p) {
      return p.addr.bank == b && s.open_row == translate(b, p.addr.row);
    });
    if (wanted) continue;
    const Command pre{CommandKind::pre, b, s.latched_row, 0, std::nullopt};
    if (device_.can_issue(pre, now)) return Choice{pre, std::nullopt};
  }
  return other;
}

std::optional<Command> Controller::schedule(std::uint32_t channel, Cycle now) const {
  if (auto c = choose(channel, now)) return c->command;
  return std::nullopt;
}

void Controller::count(std::uint64_t CacheCounters::* field) {
  ++(totals_.*field);
  if (options_.epoch_length == 0) return;
  const Cycle start = now_ / options_.epoch_length * options_.epoch_length;
  if (epochs_.empty() || epochs_.back().start != start) epochs_.push_back({start, {}});
  ++(epochs_.back().counters.*field);
}

std::vector<EpochCounters> Controller::epochs() const { return epochs_; }

void Controller::start_fill(std::uint32_t bank) {
  const auto& cfg = device_.config();
  auto& w = work_[bank];
  while (!w.decisions.empty()) {
    const std::uint32_t row = w.decisions.front();
    w.decisions.pop_front();
    const std::uint32_t sub = row / cfg.rows_far;
    NearCacheState& c = cache_mut(bank, sub);
    if (!fill_still_wanted(c, row, policy_)) continue;
    const auto free = c.free_slot();
    const std::uint32_t slot = free ? *free : select_victim(c, policy_);
    const auto& victim = c.slots()[slot];
    for (const Command& cmd : cache_fill(c, cfg, bank, sub, row, slot)) {
      const bool wb = cmd.row.segment == RowSegment::near;
      w.steps.push_back({cmd, sub, slot, wb ? victim->far_row : row, wb});
    }
    return;
  }
}

void Controller::service_fills(std::uint32_t bank, Cycle now) {
  auto& w = work_[bank];
  if (!w.has_work()) return;
  if (device_.bank(bank, now).status != BankStatus::precharged) return;
  if (w.steps.empty()) start_fill(bank);
  if (w.steps.empty()) return;

  const FillStep step = w.steps.front();
  device_.issue(step.command, now);
  w.steps.pop_front();
  NearCacheState& c = cache_mut(bank, step.subarray);
  if (step.writeback) {
    c.evict(step.slot, now);
    count(&CacheCounters::writebacks);
    count(&CacheCounters::evictions);
    return;
  }
  if (c.slots()[step.slot]) {
    c.evict(step.slot, now);
    count(&CacheCounters::evictions);
  }
  c.install(step.slot, step.far_row, now);
  count(&CacheCounters::fills);
}

void Controller::serve(std::uint32_t channel, std::size_t index, Cycle now, Cycle completion,
                       std::vector<ServedRequest>& served) {
  auto& q = queues_[channel];
  const Pending p = q[index];
  for (std::size_t j = 0; j < index; ++j) {
    if (q[j].addr.bank == p.addr.bank) ++q[j].bypassed;
  }
  q.erase(q.begin() + static_cast<std::ptrdiff_t>(index));

  const auto& cfg = device_.config();
  const RowAddress target = translate(p.addr.bank, p.addr.row);
  served.push_back({p.request, completion, target.segment});
  count(target.segment == RowSegment::near ? &CacheCounters::hits : &CacheCounters::misses);
  if (cfg.mode != DeviceMode::tldram) return;

  AccessInfo info;
  info.far_row = p.addr.row;
  info.hit = target.segment == RowSegment::near;
  info.write = p.request.kind == RequestKind::write;
  info.now = now;
  if (policy_.policy == CachePolicy::wait_based) {
    const Cycle first = p.first_command.value_or(now);
    info.saved_or_waited_cycles = p.conflicted ? first - p.request.arrival : 0;
  } else {
    const auto& t = cfg.timing;
    info.saved_or_waited_cycles = t.far.t_rc > t.near.t_rc ? t.far.t_rc - t.near.t_rc : 0;
  }
  const auto decision = on_access(cache_mut(p.addr.bank, p.addr.row / cfg.rows_far), info, policy_);
  if (!decision) return;
  auto& w = work_[p.addr.bank];
  const bool queued = std::find(w.decisions.begin(), w.decisions.end(), *decision) != w.decisions.end();
  const bool in_flight = std::any_of(w.steps.begin(), w.steps.end(), [&](const FillStep& s) {
    return !s.writeback && s.far_row == *decision;
  });
  if (!queued && !in_flight && w.decisions.size() < options_.max_pending_fills) w.decisions.push_back(*decision);
}

void Controller::tick(Cycle now, std::vector<ServedRequest>& served) {
  now_ = now;
  const auto& cfg = device_.config();
  if (!caches_.empty() && now > 0 && now % policy_.decay_interval == 0) {
    for (auto& c : caches_) c.decay();
  }
  for (std::uint32_t b = 0; b < cfg.total_banks(); ++b) service_fills(b, now);

  for (std::uint32_t ch = 0; ch < cfg.channels; ++ch) {
    const auto choice = choose(ch, now);
    if (!choice) continue;
    const Cycle done = device_.issue(choice->command, now);
    if (!choice->request) continue;
    Pending& p = queues_[ch][*choice->request];
    if (!p.first_command) p.first_command = now;
    if (choice->command.kind == CommandKind::rd || choice->command.kind == CommandKind::wr) {
      serve(ch, *choice->request, now, done, served);
    }
  }
}

bool Controller::idle() const noexcept {
  for (const auto& q : queues_) {
    if (!q.empty()) return false;
  }
  for (const auto& w : work_) {
    if (w.has_work()) return false;
  }
  return true;
}

}  // namespace tldram
