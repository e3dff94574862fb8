#include <benchmark/benchmark.h>

#include "tldram/experiment.hpp"

using namespace tldram;

namespace {

void BM_ReferenceRun(benchmark::State& state) {
  auto c = reference_config();
  c.workload.synthetic->request_count = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ReferenceRun)->Arg(10'000)->Arg(50'000)->Unit(benchmark::kMillisecond);

void BM_PolicyRun(benchmark::State& state) {
  auto c = reference_config();
  c.policy.policy = static_cast<CachePolicy>(state.range(0));
  if (c.policy.policy == CachePolicy::static_map) {
    for (std::uint32_t i = 0; i < c.device.rows_near; ++i) c.policy.static_map_list.push_back(i);
  }
  c.workload.synthetic->request_count = 20'000;
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(c));
  state.SetLabel(std::string(to_string(c.policy.policy)));
}
BENCHMARK(BM_PolicyRun)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

}  // namespace
