#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "kgq/bilinear.hpp"

namespace kgq::bench {
namespace {

void BM_TrainEpoch(benchmark::State& state) {
  const auto& g = graphs().train;
  TrainConfig cfg;
  cfg.dim = static_cast<std::size_t>(state.range(0));
  cfg.epochs = 1;
  cfg.negatives = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(train(g, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.num_edges()));
}
BENCHMARK(BM_TrainEpoch)->ArgsProduct({{32, 64}, {4, 64}})->Unit(benchmark::kMillisecond);

void BM_ScoreRow(benchmark::State& state) {
  const auto& m = model();
  std::vector<float> scratch;
  EntityId h = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.row(0, h, scratch));
    h = (h + 1) % static_cast<EntityId>(m.num_entities());
  }
}
BENCHMARK(BM_ScoreRow)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace kgq::bench
