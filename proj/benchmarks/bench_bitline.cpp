#include <benchmark/benchmark.h>

#include <vector>

#include "tldram/bitline.hpp"
#include "tldram/calibration.hpp"

using namespace tldram::bitline;

namespace {

void BM_ClosedFormTimings(benchmark::State& state) {
  const RcNetworkParams p;
  const SegmentGeometry g{static_cast<int>(state.range(0)), 512 - static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(derive_timings(p, g, Segment::far));
}
BENCHMARK(BM_ClosedFormTimings)->Arg(8)->Arg(32)->Arg(128);

void BM_NumericalActivation(benchmark::State& state) {
  const RcNetworkParams p;
  SolveOptions o;
  o.method = SolveMethod::numerical;
  o.t_end_ns = 100;
  for (auto _ : state) benchmark::DoNotOptimize(solve_activation(p, {32, 480}, Segment::far, o));
}
BENCHMARK(BM_NumericalActivation);

void BM_SegmentSweep(benchmark::State& state) {
  const RcNetworkParams p;
  const std::vector<int> lengths{8, 16, 32, 64, 128, 256};
  for (auto _ : state) benchmark::DoNotOptimize(sweep_segment_lengths(p, 512, lengths));
}
BENCHMARK(BM_SegmentSweep);

void BM_Calibrate(benchmark::State& state) {
  const auto anchors = reference_anchors();
  const std::vector<FreeParam> free{FreeParam::c_cell, FreeParam::r_drive, FreeParam::r_iso};
  for (auto _ : state) benchmark::DoNotOptimize(calibrate(RcNetworkParams{}, anchors, free));
}
BENCHMARK(BM_Calibrate)->Unit(benchmark::kMillisecond);

}  // namespace
