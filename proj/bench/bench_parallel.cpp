#include <benchmark/benchmark.h>

#include <vector>

#include "fermitherm/ensemble.hpp"
#include "fermitherm/experiments.hpp"
#include "fermitherm/master_equation.hpp"
#include "fermitherm/parallel.hpp"

using namespace fermitherm;

namespace {

void BM_HeatCurveSerial(benchmark::State& state) {
  const auto grid = cli::default_fig1_grid();
  for (auto _ : state) benchmark::DoNotOptimize(master_eq::sweep_heat_curve(-5.0, 1.0, 0.02, grid));
}

void BM_HeatCurveParallel(benchmark::State& state) {
  const auto grid = cli::default_fig1_grid();
  for (auto _ : state) benchmark::DoNotOptimize(parallel::sweep_heat_curve(-5.0, 1.0, 0.02, grid));
}

void BM_EnsembleSerial(benchmark::State& state) {
  const auto cases = ensemble::separable_cases(static_cast<std::size_t>(state.range(0)), 5, true);
  for (auto _ : state) benchmark::DoNotOptimize(ensemble::evaluate_sequences_serial(cases));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EnsembleParallel(benchmark::State& state) {
  const auto cases = ensemble::separable_cases(static_cast<std::size_t>(state.range(0)), 5, true);
  for (auto _ : state) benchmark::DoNotOptimize(parallel::evaluate_sequences(cases));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<parallel::BathJob> bath_jobs() {
  std::vector<parallel::BathJob> jobs(4);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    jobs[i].spec.K = 80;
    jobs[i].spec.gamma = 0.05;
    jobs[i].schedule = {-5.0, 1.0, 20.0 * static_cast<double>(i + 1)};
    jobs[i].dt = 1.0;
  }
  return jobs;
}

void BM_BathBatchSerial(benchmark::State& state) {
  const auto jobs = bath_jobs();
  for (auto _ : state) benchmark::DoNotOptimize(parallel::simulate_batch_serial(jobs));
}

void BM_BathBatchParallel(benchmark::State& state) {
  const auto jobs = bath_jobs();
  for (auto _ : state) benchmark::DoNotOptimize(parallel::simulate_batch(jobs));
}

}  // namespace

BENCHMARK(BM_HeatCurveSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HeatCurveParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EnsembleSerial)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleParallel)->Arg(1000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BathBatchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BathBatchParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
