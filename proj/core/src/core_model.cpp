#include "tldram/core_model.hpp"

#include <algorithm>
#include <cmath>

#include "tldram/error.hpp"

namespace tldram {

void CoreModel::validate() const {
  if (!(non_memory_ipc > 0.0) || !std::isfinite(non_memory_ipc)) {
    throw ParameterError("non_memory_ipc must be positive and finite");
  }
}

CoreState::CoreState(CoreModel model, std::span<const TraceRecord> trace, std::uint64_t tail_instructions)
    : model_(model), trace_(trace), tail_(tail_instructions) {
  model_.validate();
  for (const auto& r : trace_) mass_ += r.gap + 1;
  mass_ += tail_;
  load_gap();
}

void CoreState::load_gap() {
  if (cursor_ < trace_.size()) {
    gap_left_ = trace_[cursor_].gap;
  } else {
    in_tail_ = true;
    gap_left_ = tail_;
  }
}

bool CoreState::done() const noexcept { return in_tail_ && gap_left_ == 0 && !blocked_; }

const TraceRecord* CoreState::pending_request() const noexcept {
  if (blocked_ || in_tail_ || gap_left_ > 0) return nullptr;
  return &trace_[cursor_];
}

CoreState::Step CoreState::step(Cycle now, bool can_issue) {
  Step s;
  if (blocked_ || done()) {
    credit_ = 0;
    return s;
  }
  credit_ += model_.non_memory_ipc;
  while (credit_ >= 1.0) {
    if (gap_left_ > 0) {
      const auto n = std::min<std::uint64_t>(gap_left_, static_cast<std::uint64_t>(credit_));
      gap_left_ -= n;
      credit_ -= static_cast<double>(n);
      s.retired += n;
      continue;
    }
    if (in_tail_) break;
    if (!can_issue || s.request) break;  // one request per cycle
    const TraceRecord& r = trace_[cursor_];
    credit_ -= 1.0;
    s.request = r;
    ++cursor_;
    if (r.kind == RequestKind::read) {
      blocked_ = true;
      load_gap();
      break;
    }
    ++s.retired;
    load_gap();
  }
  if (blocked_ || done() || (pending_request() && !can_issue)) credit_ = 0;
  else credit_ -= std::floor(credit_);
  retired_ += s.retired;
  if (s.retired > 0) finish_ = std::max(finish_, now + 1);
  return s;
}

void CoreState::complete_read(Cycle now) {
  if (!blocked_) throw ParameterError("completion delivered to a core with no outstanding read");
  blocked_ = false;
  ++retired_;
  finish_ = std::max(finish_, now);
}

}  // namespace tldram
