#include <benchmark/benchmark.h>

#include "prefsim/data_gen.hpp"
#include "prefsim/experiments.hpp"
#include "prefsim/fitting.hpp"

using namespace prefsim;

namespace {

const BasePolicy kBase(0.8, MessagePool(10, 100));

SufficientStats dataset(std::size_t set_size, std::uint64_t n) {
  Rng rng(42);
  return sample_dataset({kBase, TypeDistribution(0.6), set_size, n}, rng);
}

void BM_SampleDataset(benchmark::State& state) {
  const GenerationConfig gen{kBase, TypeDistribution(0.6), 4, static_cast<std::uint64_t>(state.range(0))};
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_dataset(gen, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleDataset)->Arg(1000)->Arg(100000);

void BM_FitReward(benchmark::State& state) {
  const auto stats = dataset(static_cast<std::size_t>(state.range(0)), 10000);
  for (auto _ : state) benchmark::DoNotOptimize(fit_reward(stats));
}
BENCHMARK(BM_FitReward)->Arg(2)->Arg(4)->Arg(16);

void BM_FitRlpo(benchmark::State& state) {
  const auto stats = dataset(4, 10000);
  for (auto _ : state) benchmark::DoNotOptimize(fit_rlpo(stats, kBase));
}
BENCHMARK(BM_FitRlpo);

void BM_FitDpo(benchmark::State& state) {
  const auto stats = dataset(4, 10000);
  for (auto _ : state) benchmark::DoNotOptimize(fit_dpo(stats, kBase));
}
BENCHMARK(BM_FitDpo);

void BM_FitIl(benchmark::State& state) {
  const auto stats = dataset(2, 100000);
  FitSettings settings;
  settings.beta = 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(fit_il(stats, kBase, settings));
}
BENCHMARK(BM_FitIl);

void BM_FitSlic(benchmark::State& state) {
  const auto stats = dataset(2, 100000);
  for (auto _ : state) benchmark::DoNotOptimize(fit_slic(stats, kBase));
}
BENCHMARK(BM_FitSlic);

void BM_SweepPoint(benchmark::State& state) {
  ExperimentConfig config;
  config.num_seeds = 10;
  for (auto _ : state) benchmark::DoNotOptimize(run_point(config, 10000, config.pool_m2, 10000));
}
BENCHMARK(BM_SweepPoint)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
