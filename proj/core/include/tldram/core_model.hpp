#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "tldram/trace.hpp"

namespace tldram {

struct CoreModel {
  std::uint32_t core_id = 0;
  double non_memory_ipc = 1.0;

  void validate() const;
};

// Blocking-read in-order core walking one trace. Each cycle it retires up to
// non_memory_ipc instructions (fractional rates accumulate); a memory
// instruction takes one retirement slot to issue. Writes retire on issue,
// reads retire when their completion event arrives and block the core until
// then.
class CoreState {
 public:
  // `tail_instructions` non-memory instructions follow the last record.
  CoreState(CoreModel model, std::span<const TraceRecord> trace, std::uint64_t tail_instructions = 0);

  struct Step {
    std::uint64_t retired = 0;
    std::optional<TraceRecord> request;  // issued this cycle
  };

  // Advances one cycle. `can_issue` says whether the memory system would
  // accept a request now; if not, the core stalls on its next memory
  // instruction.
  Step step(Cycle now, bool can_issue);
  // Delivers the completion of the outstanding read.
  void complete_read(Cycle now);

  bool blocked() const noexcept { return blocked_; }
  bool done() const noexcept;
  // The memory instruction the core is about to issue, if its gap is consumed.
  const TraceRecord* pending_request() const noexcept;

  const CoreModel& model() const noexcept { return model_; }
  std::uint64_t retired() const noexcept { return retired_; }
  // Cycle count at which the last instruction retired.
  Cycle finish_cycle() const noexcept { return finish_; }
  // Total instructions in the trace (gaps + one per record + tail).
  std::uint64_t instruction_mass() const noexcept { return mass_; }

 private:
  CoreModel model_;
  std::span<const TraceRecord> trace_;
  std::size_t cursor_ = 0;
  std::uint64_t gap_left_ = 0;
  bool in_tail_ = false;
  double credit_ = 0;
  bool blocked_ = false;
  std::uint64_t retired_ = 0;
  Cycle finish_ = 0;
  std::uint64_t mass_ = 0;
  std::uint64_t tail_;

  void load_gap();
};

}  // namespace tldram
