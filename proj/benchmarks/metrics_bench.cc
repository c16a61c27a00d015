#include <benchmark/benchmark.h>

#include "depthkit/metrics.h"
#include "depthkit/synthetic.h"

namespace depthkit {
namespace {

void BM_EvalPair(benchmark::State& state) {
  const SyntheticScene a = MakeSyntheticScene(640, 480, Seed{1});
  const SyntheticScene b = MakeSyntheticScene(640, 480, Seed{2});
  for (auto _ : state) benchmark::DoNotOptimize(EvalPair(a.depth, b.depth));
}
BENCHMARK(BM_EvalPair)->Unit(benchmark::kMillisecond);

void BM_VirtualNormal(benchmark::State& state) {
  const SyntheticScene a = MakeSyntheticScene(640, 480, Seed{1});
  const SyntheticScene b = MakeSyntheticScene(640, 480, Seed{2});
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(VirtualNormalDivergence(a.depth, b.depth, a.intrinsics, n, Seed{3}));
  }
}
BENCHMARK(BM_VirtualNormal)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace depthkit
