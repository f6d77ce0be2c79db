#include <benchmark/benchmark.h>

#include "helio/folds.hpp"
#include "helio/synth.hpp"
#include "helio/tuning.hpp"

namespace {

void BM_SmallGridSearch(benchmark::State& state) {
  helio::SynthConfig sc;
  sc.days = 20;
  const auto data = helio::generate(sc);
  const auto m = helio::assemble(data, helio::FeatureSpec::defaults());
  const auto plan = helio::sample_cv_days(data, 10, 5, 1);
  helio::GridSpec grid;
  grid.c = {-1, 3, 2};
  grid.gamma = {-5, -1, 2};
  grid.refine = false;
  const auto candidates = helio::make_grid(grid);
  for (auto _ : state) benchmark::DoNotOptimize(helio::grid_search(m, candidates, plan, helio::TrainConfig{}));
}
BENCHMARK(BM_SmallGridSearch)->Unit(benchmark::kMillisecond);

}  // namespace
