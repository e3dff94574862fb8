#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "tldram/device.hpp"
#include "tldram/near_cache.hpp"

namespace tldram {

enum class RequestKind : std::uint8_t { read, write };

struct Request {
  std::uint64_t id = 0;
  std::uint32_t core_id = 0;
  Cycle arrival = 0;
  RequestKind kind = RequestKind::read;
  std::uint64_t address = 0;  // byte address
};

// Request-visible location: the row index counts visible rows (far rows in a
// TL-DRAM device, all rows in a conventional one) bank-locally,
// subarray-major.
struct DecodedAddress {
  std::uint32_t channel = 0;
  std::uint32_t bank = 0;
  std::uint32_t row = 0;
  std::uint32_t column = 0;

  friend bool operator==(const DecodedAddress&, const DecodedAddress&) = default;
};

inline constexpr std::uint64_t kLineBytes = 64;

// Byte address -> line -> (row id, column). Row ids interleave across banks
// first, then across subarrays of a bank.
class AddressMapper {
 public:
  explicit AddressMapper(const DeviceConfig& config);

  // Throws RequestError when the address lies beyond the visible capacity.
  DecodedAddress decode(std::uint64_t address) const;
  std::uint64_t encode(const DecodedAddress& d) const;

  // Global row id of a decoded address and back (row id 0 maps to bank 0).
  std::uint64_t row_id(const DecodedAddress& d) const noexcept;
  std::uint64_t address_of_row(std::uint64_t row_id, std::uint32_t column = 0) const;
  std::uint64_t capacity_rows() const noexcept;

 private:
  std::uint32_t banks_;
  std::uint32_t banks_per_channel_;
  std::uint32_t subarrays_;
  std::uint32_t rows_per_subarray_;
  std::uint32_t columns_;
};

// Where a visible row is served from right now.
RowAddress translate(const DeviceConfig& device, const PolicyConfig& policy, const NearCacheState& cache,
                     std::uint32_t visible_row);

struct ControllerOptions {
  // Per-channel request queue entries; also the row-hit bypass bound.
  std::uint32_t queue_capacity = 32;
  // Cache decisions a bank may hold before new ones are dropped.
  std::uint32_t max_pending_fills = 4;
  // Length of the per-epoch cache statistic windows; 0 disables them.
  Cycle epoch_length = 100'000;
};

struct ServedRequest {
  Request request;
  Cycle completion = 0;
  RowSegment served_from = RowSegment::far;
};

struct CacheCounters {
  std::uint64_t hits = 0;  // demand accesses served from the near segment
  std::uint64_t misses = 0;
  std::uint64_t fills = 0;
  std::uint64_t writebacks = 0;
  std::uint64_t evictions = 0;

  friend bool operator==(const CacheCounters&, const CacheCounters&) = default;
};

struct EpochCounters {
  Cycle start = 0;
  CacheCounters counters;

  friend bool operator==(const EpochCounters&, const EpochCounters&) = default;
};

// FR-FCFS open-row controller for every channel of one device. Near segments
// are managed per subarray as caches of the far rows (or pinned at start for
// static_map); fills run lazily once a bank is precharged.
class Controller {
 public:
  Controller(DramDevice& device, PolicyConfig policy, ControllerOptions options = {});

  const AddressMapper& mapper() const noexcept { return mapper_; }
  const PolicyConfig& policy() const noexcept { return policy_; }
  const ControllerOptions& options() const noexcept { return options_; }

  bool can_accept(std::uint32_t channel) const noexcept;
  // Decodes and queues a request. Throws RequestError for addresses outside
  // the device; the caller owns the drop accounting.
  void enqueue(const Request& request, Cycle now);

  RowAddress translate(std::uint32_t bank, std::uint32_t visible_row) const;

  // The command FR-FCFS would issue on `channel` at `now`, without side
  // effects. This may be a PRE that frees a bank for pending fills.
  std::optional<Command> schedule(std::uint32_t channel, Cycle now) const;

  // One controller cycle: fill transfers, one channel command per channel,
  // decay and epoch bookkeeping. Served requests are appended to `served`.
  void tick(Cycle now, std::vector<ServedRequest>& served);

  // No queued requests and no fill work outstanding.
  bool idle() const noexcept;
  std::size_t queued(std::uint32_t channel) const { return queues_.at(channel).size(); }

  const NearCacheState& cache(std::uint32_t bank, std::uint32_t subarray) const;
  const CacheCounters& counters() const noexcept { return totals_; }
  // Closed epochs plus the open one.
  std::vector<EpochCounters> epochs() const;

 private:
  struct Pending {
    Request request;
    DecodedAddress addr;
    bool conflicted = false;  // bank busy with another row at arrival
    std::optional<Cycle> first_command;
    std::uint32_t bypassed = 0;
  };

  struct FillStep {
    Command command;
    std::uint32_t subarray = 0;
    std::uint32_t slot = 0;
    std::uint32_t far_row = 0;  // row being installed (fill) or written back
    bool writeback = false;
  };

  struct BankWork {
    std::deque<std::uint32_t> decisions;  // far rows chosen for caching
    std::deque<FillStep> steps;           // transfers of the fill in progress
    bool has_work() const noexcept { return !decisions.empty() || !steps.empty(); }
  };

  struct Choice {
    Command command;
    std::optional<std::size_t> request;  // index into the queue; empty for a fill PRE
  };

  NearCacheState& cache_mut(std::uint32_t bank, std::uint32_t subarray);
  std::optional<Command> next_command(const Pending& p, Cycle now) const;
  std::optional<Choice> choose(std::uint32_t channel, Cycle now) const;
  void service_fills(std::uint32_t bank, Cycle now);
  void start_fill(std::uint32_t bank);
  void serve(std::uint32_t channel, std::size_t index, Cycle now, Cycle completion,
             std::vector<ServedRequest>& served);
  void count(std::uint64_t CacheCounters::* field);

  DramDevice& device_;
  PolicyConfig policy_;
  ControllerOptions options_;
  AddressMapper mapper_;
  std::vector<std::deque<Pending>> queues_;
  std::vector<NearCacheState> caches_;  // bank-major, one per subarray
  std::vector<BankWork> work_;
  CacheCounters totals_;
  std::vector<EpochCounters> epochs_;
  Cycle now_ = 0;
};

}  // namespace tldram
