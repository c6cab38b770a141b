#include <benchmark/benchmark.h>

#include "pensim/scenario.hpp"
#include "pensim/simulate.hpp"
#include "pensim/verify.hpp"

using namespace pensim;

namespace {

const PlanConfig& baseline() {
  static const PlanConfig cfg = default_scenario().config;
  return cfg;
}

void BM_Hazard(benchmark::State& state) {
  const auto& m = baseline().population.mortality;
  double x = 25.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hazard(m, x, 10.0));
    x = x < 100.0 ? x + 0.01 : 25.0;
  }
}
BENCHMARK(BM_Hazard);

void BM_Survival(benchmark::State& state) {
  const auto& pop = baseline().population;
  double x = 25.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(survival_unclamped(pop, x, 10.0));
    x = x < 100.0 ? x + 0.01 : 25.0;
  }
}
BENCHMARK(BM_Survival);

void BM_ActiveCount(benchmark::State& state) {
  const auto& pop = baseline().population;
  for (auto _ : state) benchmark::DoNotOptimize(active_count(pop, 10.0));
}
BENCHMARK(BM_ActiveCount);

void BM_ValueShape(benchmark::State& state) {
  const auto& cfg = baseline();
  for (auto _ : state) {
    const auto shape = value_shape(cfg, 10.0);
    benchmark::DoNotOptimize(shape);
  }
}
BENCHMARK(BM_ValueShape);

void BM_TargetLiability(benchmark::State& state) {
  const auto& cfg = baseline();
  for (auto _ : state) benchmark::DoNotOptimize(target_liability(cfg));
}
BENCHMARK(BM_TargetLiability);

void BM_SolveValueOde(benchmark::State& state) {
  const auto& cfg = baseline();
  for (auto _ : state) {
    const auto sol = solve_value_ode(cfg, 0.0, CoefficientMode::FrozenAtEval);
    benchmark::DoNotOptimize(sol.curvature_at_eval);
  }
}
BENCHMARK(BM_SolveValueOde);

void BM_SimulatePaths(benchmark::State& state) {
  const auto& cfg = baseline();
  SimulationSpec spec;
  spec.steps = static_cast<std::size_t>(state.range(0));
  spec.paths = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    const auto result = simulate_paths(cfg, spec);
    benchmark::DoNotOptimize(result.grid.assets.back());
  }
}
BENCHMARK(BM_SimulatePaths)->Args({250, 100})->Args({1000, 250});

void BM_Summarize(benchmark::State& state) {
  const auto& cfg = baseline();
  SimulationSpec spec;
  spec.steps = 500;
  spec.paths = 500;
  const auto result = simulate_paths(cfg, spec);
  for (auto _ : state) {
    const auto summary = summarize(result);
    benchmark::DoNotOptimize(summary.contribution.mean.back());
  }
}
BENCHMARK(BM_Summarize);

}  // namespace

BENCHMARK_MAIN();
