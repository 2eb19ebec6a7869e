#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "kgq/homomorphism.hpp"
#include "kgq/unraveling.hpp"

namespace kgq::bench {
namespace {

void BM_UnravelTriangle(benchmark::State& state) {
  const auto q = triangle();
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(unravel(q, d));
}
BENCHMARK(BM_UnravelTriangle)->DenseRange(2, 10, 2);

void BM_UnravelSquare(benchmark::State& state) {
  const auto q = square();
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(unravel(q, d));
}
BENCHMARK(BM_UnravelSquare)->DenseRange(2, 10, 2);

// Deeper unraveling into the shallower one: a tree source, so AC-3 decides it.
void BM_ContainmentChain(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto shallow = unravel(square(), d).query;
  const auto deep = unravel(square(), d + 1).query;
  for (auto _ : state) benchmark::DoNotOptimize(is_contained(deep, shallow));
}
BENCHMARK(BM_ContainmentChain)->DenseRange(2, 8, 2)->Unit(benchmark::kMicrosecond);

// Cyclic source into its own unraveling: no homomorphism exists, so the
// search has to exhaust.
void BM_CycleIntoTree(benchmark::State& state) {
  const auto q = square();
  const auto u = unravel(q, static_cast<int>(state.range(0))).query;
  for (auto _ : state) benchmark::DoNotOptimize(find_homomorphism(q, u));
}
BENCHMARK(BM_CycleIntoTree)->DenseRange(2, 8, 2)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace kgq::bench
