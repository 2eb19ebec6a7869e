#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "kgq/fuzzy_exec.hpp"
#include "kgq/plan.hpp"
#include "kgq/predictor.hpp"
#include "kgq/symbolic_eval.hpp"
#include "kgq/unraveling.hpp"

namespace kgq::bench {
namespace {

void BM_EvaluateCyclicCq(benchmark::State& state) {
  const auto& g = graphs().full;
  const auto q = state.range(0) == 3 ? triangle() : square();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_cq(q, g));
}
BENCHMARK(BM_EvaluateCyclicCq)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_EvaluateUnravelledPlan(benchmark::State& state) {
  const auto& g = graphs().full;
  const auto plan = compile_plan(unravel(triangle(), static_cast<int>(state.range(0))).query, g.vocabulary());
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_plan(plan, g));
}
BENCHMARK(BM_EvaluateUnravelledPlan)->DenseRange(2, 6, 2)->Unit(benchmark::kMicrosecond);

void BM_FuzzyCrisp(benchmark::State& state) {
  const auto& g = graphs().full;
  CrispPredictor crisp(g);
  const auto plan = compile_plan(unravel(triangle(), static_cast<int>(state.range(0))).query, g.vocabulary());
  for (auto _ : state) benchmark::DoNotOptimize(execute(plan, crisp));
}
BENCHMARK(BM_FuzzyCrisp)->DenseRange(2, 6, 2)->Unit(benchmark::kMicrosecond);

// Dense projections against a cached model: one n x n pass per projection.
void BM_FuzzyModel(benchmark::State& state) {
  const auto& g = graphs().full;
  ScoreCache cache(model());
  const auto plan = compile_plan(unravel(triangle(), static_cast<int>(state.range(0))).query, g.vocabulary());
  FuzzyConfig cfg;
  cfg.projection = state.range(1) == 0 ? ProjectionMode::max_product : ProjectionMode::noisy_or;
  execute(plan, cache, cfg);  // fill the cache outside the timed loop
  for (auto _ : state) benchmark::DoNotOptimize(execute(plan, cache, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(plan.num_projections()));
}
BENCHMARK(BM_FuzzyModel)->ArgsProduct({{2, 4}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace kgq::bench
