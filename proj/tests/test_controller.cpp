#include <doctest.h>

#include <map>
#include <random>

#include "tldram/audit.hpp"
#include "tldram/controller.hpp"
#include "tldram/error.hpp"
#include "tldram/simulation.hpp"
#include "tldram/trace.hpp"

using namespace tldram;

namespace {

DeviceConfig tiny_device(DeviceMode mode = DeviceMode::tldram, std::uint32_t subarrays = 1) {
  DeviceConfig c;
  c.channels = 1;
  c.banks_per_rank = 2;
  c.subarrays_per_bank = subarrays;
  c.rows_near = 4;
  c.rows_far = 12;
  c.columns_per_row = 8;
  c.timing.near = {3, 8, 11, 19};
  c.timing.far = {5, 23, 31, 53};
  c.timing.baseline = {6, 18, 25, 42};
  c.timing.cl = 11;
  c.timing.t_transfer_extra = 4;
  c.mode = mode;
  return c;
}

PolicyConfig policy_of(CachePolicy p) {
  PolicyConfig c;
  c.policy = p;
  return c;
}

Request request_to(const Controller& c, std::uint64_t id, std::uint32_t bank, std::uint32_t row, Cycle now,
                   RequestKind kind = RequestKind::read) {
  const DecodedAddress d{0, bank, row, 0};
  return {id, 0, now, kind, c.mapper().encode(d)};
}

// Ticks until `id` is served; returns the cycle after serving.
Cycle run_until_served(Controller& c, std::uint64_t id, Cycle now, std::vector<ServedRequest>& served) {
  for (Cycle limit = now + 10'000; now < limit; ++now) {
    const std::size_t before = served.size();
    c.tick(now, served);
    for (std::size_t i = before; i < served.size(); ++i) {
      if (served[i].request.id == id) return now + 1;
    }
  }
  FAIL("request never served");
  return now;
}

std::vector<TraceRecord> small_trace(std::uint64_t seed, std::uint64_t rows, std::uint64_t n = 3000,
                                     double gap = 4) {
  SyntheticSpec s;
  s.request_count = n;
  s.working_set_rows = rows;
  s.zipf_exponent = 0.9;
  s.mean_gap = gap;
  s.seed = seed;
  s.columns_per_row = 8;
  return generate_synthetic(s);
}

}  // namespace

TEST_CASE("address mapping interleaves rows over banks then subarrays") {
  const auto cfg = tiny_device(DeviceMode::tldram, 2);
  const AddressMapper m(cfg);
  CHECK(m.capacity_rows() == 2 * 2 * 12);
  CHECK(m.decode(0) == DecodedAddress{0, 0, 0, 0});
  CHECK(m.decode(64) == DecodedAddress{0, 0, 0, 1});
  CHECK(m.decode(8 * 64) == DecodedAddress{0, 1, 0, 0});
  CHECK(m.decode(2 * 8 * 64) == DecodedAddress{0, 0, 12, 0});  // subarray 1 of bank 0
  CHECK(m.decode(4 * 8 * 64) == DecodedAddress{0, 0, 1, 0});
  CHECK_THROWS_AS(m.decode(48 * 8 * 64), RequestError);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t line = rng() % (m.capacity_rows() * 8);
    const auto d = m.decode(line * 64);
    CHECK(m.encode(d) == line * 64);
    CHECK(m.row_id(d) == line / 8);
  }
}

TEST_CASE("translate examples") {
  auto cfg = tiny_device();
  cfg.rows_far = 16;
  NearCacheState cache(4, 8);
  cache.install(3, 12, 0);
  const auto ca = policy_of(CachePolicy::cache_on_access);
  CHECK(translate(cfg, ca, cache, 12) == RowAddress{RowSegment::near, 3});
  CHECK(translate(cfg, ca, cache, 7) == RowAddress{RowSegment::far, 7});
  CHECK(translate(cfg, policy_of(CachePolicy::none), cache, 12) == RowAddress{RowSegment::far, 12});
  CHECK(translate(tiny_device(DeviceMode::conventional), policy_of(CachePolicy::none), NearCacheState{}, 5) ==
        RowAddress{RowSegment::baseline, 5});
  // Second subarray slots are offset by rows_near.
  const auto two = tiny_device(DeviceMode::tldram, 2);
  NearCacheState c2(4, 8);
  c2.install(1, 14, 0);
  CHECK(translate(two, ca, c2, 14) == RowAddress{RowSegment::near, 5});
}

TEST_CASE("on_access policy decisions") {
  SUBCASE("cache_on_access caches every far access") {
    NearCacheState c(3, 6);
    const auto p = policy_of(CachePolicy::cache_on_access);
    CHECK(on_access(c, {7, false, false, 0, 1}, p) == std::optional<std::uint32_t>{7});
    c.install(0, 7, 1);
    CHECK_FALSE(on_access(c, {7, true, true, 0, 2}, p));
    CHECK(c.slots()[0]->dirty);
    CHECK(c.slots()[0]->last_use == 2);
  }
  SUBCASE("wait_based needs a waited cycle or the threshold") {
    NearCacheState c(3, 6);
    auto p = policy_of(CachePolicy::wait_based);
    CHECK_FALSE(on_access(c, {4, false, false, 0, 1}, p));
    CHECK(on_access(c, {4, false, false, 1, 1}, p) == std::optional<std::uint32_t>{4});
    p.caching_threshold = 10;
    CHECK_FALSE(on_access(c, {4, false, false, 9, 1}, p));
    CHECK(on_access(c, {4, false, false, 10, 1}, p));
  }
  SUBCASE("benefit_based replaces the weakest slot once beaten") {
    NearCacheState c(3, 6);
    const auto p = policy_of(CachePolicy::benefit_based);
    c.install(0, 10, 0);
    c.install(1, 11, 0);
    c.install(2, 12, 0);
    c.set_slot_benefit(0, 5);
    c.set_slot_benefit(1, 2);
    c.set_slot_benefit(2, 9);
    CHECK_FALSE(on_access(c, {3, false, false, 0, 1}, p));
    CHECK_FALSE(on_access(c, {3, false, false, 0, 2}, p));
    CHECK(c.benefit_of(3) == 2);
    const auto d = on_access(c, {3, false, false, 0, 3}, p);
    CHECK(d == std::optional<std::uint32_t>{3});
    CHECK(select_victim(c, p) == 1);
    // Hits raise the slot's own counter.
    CHECK_FALSE(on_access(c, {12, true, false, 0, 4}, p));
    CHECK(c.benefit_of(12) == 10);
  }
  SUBCASE("per-saved-cycle increments") {
    NearCacheState c(2, 4);
    auto p = policy_of(CachePolicy::benefit_based);
    p.benefit_increment_per_saved_cycle = true;
    on_access(c, {5, false, false, 34, 1}, p);
    CHECK(c.benefit_of(5) == 34);
  }
  SUBCASE("none and static_map never decide") {
    NearCacheState c(2, 4);
    CHECK_FALSE(on_access(c, {5, false, false, 100, 1}, policy_of(CachePolicy::none)));
    CHECK_FALSE(on_access(c, {5, false, false, 100, 1}, policy_of(CachePolicy::static_map)));
  }
}

TEST_CASE("decay halves every counter") {
  NearCacheState c(2, 4);
  c.install(0, 1, 0);
  c.install(1, 2, 0);
  c.set_slot_benefit(0, 8);
  c.set_slot_benefit(1, 3);
  c.add_benefit(9, 5, 0);
  c.decay();
  CHECK(c.slots()[0]->benefit == 4);
  CHECK(c.slots()[1]->benefit == 1);
  CHECK(c.benefit_of(9) == 2);
}

TEST_CASE("victim selection") {
  NearCacheState c(3, 0);
  c.install(0, 1, 100);
  c.install(1, 2, 40);
  c.install(2, 3, 77);
  const auto bb = policy_of(CachePolicy::benefit_based);
  c.set_slot_benefit(0, 5);
  c.set_slot_benefit(1, 2);
  c.set_slot_benefit(2, 9);
  CHECK(select_victim(c, bb) == 1);
  c.set_slot_benefit(1, 5);
  c.set_slot_benefit(0, 4);
  c.set_slot_benefit(1, 4);
  CHECK(select_victim(c, bb) == 0);
  CHECK(select_victim(c, policy_of(CachePolicy::cache_on_access)) == 1);
  CHECK(select_victim(c, policy_of(CachePolicy::wait_based)) == 1);
}

TEST_CASE("cache fill command sequences") {
  const auto cfg = tiny_device(DeviceMode::tldram, 2);
  NearCacheState c(4, 0);
  auto clean = cache_fill(c, cfg, 1, 1, 15, 2);
  REQUIRE(clean.size() == 1);
  CHECK(clean[0].kind == CommandKind::transfer);
  CHECK(clean[0].row == RowAddress{RowSegment::far, 15});
  CHECK(clean[0].transfer_dst == RowAddress{RowSegment::near, 6});
  c.install(2, 13, 0);
  c.touch(2, 1, true);
  auto dirty = cache_fill(c, cfg, 1, 1, 15, 2);
  REQUIRE(dirty.size() == 2);
  CHECK(dirty[0].row == RowAddress{RowSegment::near, 6});
  CHECK(dirty[0].transfer_dst == RowAddress{RowSegment::far, 13});
  CHECK(dirty[1].row == RowAddress{RowSegment::far, 15});
}

TEST_CASE("FR-FCFS prefers row hits over older misses") {
  DramDevice dev(tiny_device());
  Controller c(dev, policy_of(CachePolicy::none));
  std::vector<ServedRequest> served;
  CHECK_FALSE(c.schedule(0, 0));
  c.enqueue(request_to(c, 1, 0, 5, 0), 0);
  Cycle now = run_until_served(c, 1, 0, served);
  c.enqueue(request_to(c, 2, 0, 9, now), now);
  c.enqueue(request_to(c, 3, 0, 5, now), now);
  const auto cmd = c.schedule(0, now);
  REQUIRE(cmd);
  CHECK(cmd->kind == CommandKind::rd);
  CHECK(cmd->row == RowAddress{RowSegment::far, 5});
}

TEST_CASE("one command per channel per cycle") {
  DramDevice dev(tiny_device());
  Controller c(dev, policy_of(CachePolicy::none));
  c.enqueue(request_to(c, 1, 0, 1, 0), 0);
  c.enqueue(request_to(c, 2, 1, 1, 0), 0);
  std::vector<ServedRequest> served;
  c.tick(0, served);
  CHECK(dev.log().size() == 1);
  c.tick(1, served);
  CHECK(dev.log().size() == 2);
  CHECK(dev.log()[1].cycle == 1);
}

TEST_CASE("row hits cannot starve an older miss beyond the queue capacity") {
  DramDevice dev(tiny_device());
  ControllerOptions opt;
  opt.queue_capacity = 4;
  Controller c(dev, policy_of(CachePolicy::none), opt);
  std::vector<ServedRequest> served;
  c.enqueue(request_to(c, 1, 0, 0, 0), 0);
  Cycle now = run_until_served(c, 1, 0, served);
  c.enqueue(request_to(c, 2, 0, 3, now), now);
  std::uint64_t id = 10;
  std::size_t hits_before_miss = 0;
  bool miss_served = false;
  for (Cycle end = now + 5000; now < end && !miss_served; ++now) {
    while (c.can_accept(0)) c.enqueue(request_to(c, id++, 0, 0, now), now);
    const std::size_t before = served.size();
    c.tick(now, served);
    for (std::size_t i = before; i < served.size(); ++i) {
      if (served[i].request.id == 2) miss_served = true;
      else if (!miss_served) ++hits_before_miss;
    }
  }
  CHECK(miss_served);
  CHECK(hits_before_miss <= opt.queue_capacity);
}

TEST_CASE("demand is served from far first, then from the near copy") {
  DramDevice dev(tiny_device());
  Controller c(dev, policy_of(CachePolicy::cache_on_access));
  std::vector<ServedRequest> served;
  c.enqueue(request_to(c, 1, 0, 7, 0), 0);
  Cycle now = run_until_served(c, 1, 0, served);
  CHECK(served.back().served_from == RowSegment::far);
  while (!c.idle()) c.tick(now++, served);
  CHECK(c.translate(0, 7).segment == RowSegment::near);
  CHECK(c.counters().fills == 1);
  c.enqueue(request_to(c, 2, 0, 7, now), now);
  run_until_served(c, 2, now, served);
  CHECK(served.back().served_from == RowSegment::near);
  CHECK(c.counters().hits == 1);
  CHECK(c.counters().misses == 1);
  CHECK(audit_command_log(dev.log(), dev.config()).ok());
}

TEST_CASE("static map pins rows with transfers before any request") {
  auto p = policy_of(CachePolicy::static_map);
  p.static_map_list = {2, 7};
  DramDevice dev(tiny_device());
  Controller c(dev, p);
  c.enqueue(request_to(c, 1, 0, 2, 0), 0);
  c.enqueue(request_to(c, 2, 1, 3, 0), 0);
  std::vector<ServedRequest> served;
  Cycle now = 0;
  while (!c.idle()) c.tick(now++, served);
  std::size_t transfers = 0;
  for (std::size_t i = 0; i < dev.log().size(); ++i) {
    if (dev.log()[i].kind != CommandKind::transfer) continue;
    ++transfers;
    for (std::size_t j = 0; j < i; ++j) {
      if (dev.log()[j].bank == dev.log()[i].bank) CHECK(dev.log()[j].kind == CommandKind::transfer);
    }
  }
  CHECK(transfers == 4);
  REQUIRE(served.size() == 2);
  for (const auto& s : served) {
    CHECK(s.served_from == (s.request.id == 1 ? RowSegment::near : RowSegment::far));
  }
  CHECK(c.translate(1, 7) == RowAddress{RowSegment::near, 1});
  p.static_map_list = {1, 2, 3, 4, 5};
  DramDevice dev2(tiny_device());
  CHECK_THROWS_AS((Controller{dev2, p}), ParameterError);
}

TEST_CASE("policy none is latency-neutral") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SimulationInput in;
    in.device = tiny_device();
    in.policy = policy_of(CachePolicy::none);
    in.traces = {small_trace(seed, 24)};
    const auto a = simulate(in);
    in.device.timing.near = {1, 1, 1, 1};
    const auto b = simulate(in);
    CHECK(a.requests == b.requests);
    CHECK(a.transfers.empty());
    for (const auto& r : a.requests) CHECK(r.served_from == RowSegment::far);
    // A conventional device with baseline timing equal to far timing.
    in.device = tiny_device(DeviceMode::conventional);
    in.device.timing.baseline = in.device.timing.far;
    const auto conv = simulate(in);
    REQUIRE(conv.requests.size() == a.requests.size());
    for (std::size_t i = 0; i < a.requests.size(); ++i) {
      CHECK(conv.requests[i].completion == a.requests[i].completion);
      CHECK(conv.requests[i].arrival == a.requests[i].arrival);
    }
  }
}

namespace {

struct RandomRun {
  DeviceConfig cfg;
  PolicyConfig policy;
  std::uint64_t seed;
};

// Drives a controller with random requests and checks the cache invariants
// after every tick.
void check_invariants(const RandomRun& run) {
  DramDevice dev(run.cfg);
  ControllerOptions opt;
  opt.queue_capacity = 8;
  Controller c(dev, run.policy, opt);
  std::mt19937_64 rng(run.seed);
  const auto& cfg = dev.config();
  const std::uint32_t inc = run.policy.benefit_increment_hit;
  // accesses per (bank, far row) in the current decay interval, and the max seen
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> current, worst;
  std::vector<ServedRequest> served;
  std::uint64_t id = 0;
  for (Cycle now = 0; now < 20'000; ++now) {
    if (now > 0 && now % run.policy.decay_interval == 0) current.clear();
    if (rng() % 3 == 0 && c.can_accept(0)) {
      const std::uint32_t bank = rng() % cfg.total_banks();
      const auto row = static_cast<std::uint32_t>(rng() % 6 == 0 ? rng() % cfg.rows_in_bank(RowSegment::far)
                                                                  : rng() % 5);
      const auto kind = rng() % 3 == 0 ? RequestKind::write : RequestKind::read;
      c.enqueue(request_to(c, id++, bank, row, now, kind), now);
    }
    served.clear();
    c.tick(now, served);
    for (const auto& s : served) {
      const auto d = c.mapper().decode(s.request.address);
      CHECK(s.completion >= s.request.arrival + cfg.timing.cl);
      auto& n = current[{d.bank, d.row}];
      ++n;
      auto& w = worst[{d.bank, d.row}];
      w = std::max(w, n);
    }
    if (now % 97 != 0) continue;
    for (std::uint32_t b = 0; b < cfg.total_banks(); ++b) {
      for (std::uint32_t sub = 0; sub < cfg.subarrays_per_bank; ++sub) {
        const auto& cache = c.cache(b, sub);
        std::map<std::uint32_t, int> seen;
        for (std::uint32_t slot = 0; slot < cache.size(); ++slot) {
          const auto& s = cache.slots()[slot];
          if (!s) continue;
          CHECK(++seen[s->far_row] == 1);
          CHECK(s->far_row / cfg.rows_far == sub);
          const RowAddress near{RowSegment::near, sub * cfg.rows_near + slot};
          CHECK(dev.tag(b, near) == ((RowTag{b} << 32) | s->far_row));
          if (run.policy.policy == CachePolicy::benefit_based) {
            CHECK(s->benefit <= 2 * worst[{b, s->far_row}] * inc);
          }
        }
        for (const auto& e : cache.shadow()) {
          if (run.policy.policy == CachePolicy::benefit_based) {
            CHECK(e.benefit <= 2 * worst[{b, e.far_row}] * inc);
          }
        }
      }
      // Far rows keep their own identity: writebacks return the same row.
      for (std::uint32_t r = 0; r < cfg.rows_in_bank(RowSegment::far); ++r) {
        CHECK(dev.tag(b, {RowSegment::far, r}) == ((RowTag{b} << 32) | r));
      }
    }
  }
  CHECK(audit_command_log(dev.log(), cfg).ok());
  // Every writeback transfer moves a near copy back to the far row it came from.
  for (const auto& t : dev.transfers()) {
    if (t.src.segment == RowSegment::near) CHECK(t.tag == ((RowTag{t.bank} << 32) | t.dst.index));
  }
  CHECK(c.counters().writebacks <= c.counters().evictions);
}

}  // namespace

TEST_CASE("cache coherence, counter bounds and timing safety under random traffic") {
  for (auto p : {CachePolicy::cache_on_access, CachePolicy::wait_based, CachePolicy::benefit_based}) {
    for (std::uint32_t subarrays : {1u, 2u}) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        PolicyConfig policy = policy_of(p);
        policy.decay_interval = 500;
        policy.benefit_increment_hit = seed;
        CAPTURE(to_string(p));
        CAPTURE(subarrays);
        CAPTURE(seed);
        check_invariants({tiny_device(DeviceMode::tldram, subarrays), policy, seed});
      }
    }
  }
}

TEST_CASE("every simulated request completes") {
  for (auto p : {CachePolicy::none, CachePolicy::cache_on_access, CachePolicy::wait_based,
                 CachePolicy::benefit_based}) {
    SimulationInput in;
    in.device = tiny_device(DeviceMode::tldram, 2);
    in.policy = policy_of(p);
    in.traces = {small_trace(3, 48, 2000, 2), small_trace(4, 48, 2000, 2)};
    const auto r = simulate(in);
    CHECK(r.requests.size() == 4000);
    for (const auto& q : r.requests) CHECK(q.completion >= q.arrival + in.device.timing.cl);
    CHECK(audit_command_log(r.log, in.device).ok());
  }
}
