#include "tldram/timing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tldram/error.hpp"

namespace tldram {

std::string_view to_string(RowSegment s) noexcept {
  switch (s) {
    case RowSegment::near: return "near";
    case RowSegment::far: return "far";
    case RowSegment::baseline: return "baseline";
  }
  return "?";
}

RowSegment row_segment_from_string(std::string_view s) {
  if (s == "near") return RowSegment::near;
  if (s == "far") return RowSegment::far;
  if (s == "baseline") return RowSegment::baseline;
  throw ParameterError("unknown row segment '" + std::string(s) + "'");
}

const TimingCycles& TimingTable::of(RowSegment s) const noexcept {
  switch (s) {
    case RowSegment::near: return near;
    case RowSegment::far: return far;
    case RowSegment::baseline: break;
  }
  return baseline;
}

std::uint32_t TimingTable::transfer_cycles(RowSegment src, RowSegment dst) const noexcept {
  return std::max(of(src).t_rc, of(dst).t_rc) + t_transfer_extra;
}

void TimingTable::validate() const {
  for (const TimingCycles* t : {&near, &far, &baseline}) {
    if (t->t_rcd < 1 || t->t_ras < 1 || t->t_rp < 1 || t->t_rc < 1) {
      throw ParameterError("timing entries must be >= 1 cycle");
    }
    if (t->t_ras < t->t_rcd) throw ParameterError("t_ras must be >= t_rcd");
  }
  if (cl < 1 || t_transfer_extra < 1) throw ParameterError("cl and t_transfer_extra must be >= 1 cycle");
}

std::uint32_t to_cycles(double ns, double t_ck_ns) {
  if (!(t_ck_ns > 0.0) || !std::isfinite(t_ck_ns)) throw ParameterError("t_ck must be positive");
  if (!(ns >= 0.0) || !std::isfinite(ns)) throw ParameterError("latency must be finite and non-negative");
  // Guard against 52.5 / 1.25 landing a hair above 42.
  const double c = std::ceil(ns / t_ck_ns - 1e-9);
  return static_cast<std::uint32_t>(std::max(1.0, c));
}

TimingCycles to_cycles(const bitline::LatencyProfile& p, double t_ck_ns) {
  return {to_cycles(p.t_rcd, t_ck_ns), to_cycles(p.t_ras, t_ck_ns), to_cycles(p.t_rp, t_ck_ns),
          to_cycles(p.t_rc, t_ck_ns)};
}

TimingTable make_timing_table(const bitline::LatencyProfile& near, const bitline::LatencyProfile& far,
                              const bitline::LatencyProfile& baseline, double cl_ns, double t_ck_ns,
                              double transfer_extra_ns) {
  TimingTable t;
  t.near = to_cycles(near, t_ck_ns);
  t.far = to_cycles(far, t_ck_ns);
  t.baseline = to_cycles(baseline, t_ck_ns);
  t.cl = to_cycles(cl_ns, t_ck_ns);
  t.t_transfer_extra = to_cycles(transfer_extra_ns, t_ck_ns);
  t.validate();
  return t;
}

}  // namespace tldram
