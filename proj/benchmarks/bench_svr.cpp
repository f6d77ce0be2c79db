#include <benchmark/benchmark.h>

#include <cmath>

#include "helio/seeding.hpp"
#include "helio/svr.hpp"

namespace {

struct Problem {
  helio::Matrix x;
  std::vector<double> y;
};

Problem make_problem(std::size_t n, std::size_t d) {
  helio::Rng rng(42);
  Problem p{helio::Matrix(n, d), {}};
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      p.x(i, j) = rng.normal();
      s += p.x(i, j);
    }
    p.y.push_back(std::tanh(s) + 0.05 * rng.normal());
  }
  return p;
}

void BM_KernelRbf(benchmark::State& state) {
  const auto p = make_problem(2, static_cast<std::size_t>(state.range(0)));
  const helio::KernelSpec k{.gamma = 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(helio::kernel_eval(k, p.x.row(0), p.x.row(1)));
}
BENCHMARK(BM_KernelRbf)->Arg(4)->Arg(16)->Arg(64);

void BM_Train(benchmark::State& state, helio::WorkingSetSelection rule) {
  const auto p = make_problem(static_cast<std::size_t>(state.range(0)), 4);
  helio::TrainConfig cfg;
  cfg.c = 4;
  cfg.selection = rule;
  const helio::KernelSpec k{.gamma = 0.25};
  for (auto _ : state) benchmark::DoNotOptimize(helio::train(p.x, p.y, cfg, k));
}
BENCHMARK_CAPTURE(BM_Train, first_order, helio::WorkingSetSelection::first_order)->Arg(250)->Arg(1000);
BENCHMARK_CAPTURE(BM_Train, second_order, helio::WorkingSetSelection::second_order)->Arg(250)->Arg(1000);

}  // namespace
