#include <benchmark/benchmark.h>

#include <vector>

#include "kinc/fitter.hpp"
#include "kinc/inequality.hpp"
#include "kinc/kappa_model.hpp"
#include "kinc/sampler.hpp"
#include "kinc/tax_engine.hpp"

namespace {

const kinc::ModelParams kParams(1.2698, 0.8209, 1.7979, 1.02e-8);

void BM_Quantile(benchmark::State& state) {
  double u = 0.37;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kinc::quantile(u, kParams));
    u = u < 0.9 ? u + 1e-7 : 0.1;
  }
}
BENCHMARK(BM_Quantile);

void BM_SamplePopulation(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kinc::sample_population(kParams, n, 42, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SamplePopulation)->Arg(10'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_Fit(benchmark::State& state) {
  std::vector<double> v;
  for (int i = 1; i <= kinc::kPercentileCount; ++i)
    v.push_back(kinc::quantile(kinc::percentile_survival(i), kParams));
  const kinc::PercentileSeries series(2023, kinc::Basis::PreTax, v);
  for (auto _ : state) benchmark::DoNotOptimize(kinc::fit(series));
}
BENCHMARK(BM_Fit)->Unit(benchmark::kMillisecond);

void BM_Gini(benchmark::State& state) {
  const auto pop = kinc::sample_population(kParams, static_cast<std::size_t>(state.range(0)), 42, 1);
  for (auto _ : state) benchmark::DoNotOptimize(kinc::gini(pop));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Gini)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_TaxShare(benchmark::State& state) {
  const auto pop = kinc::sample_population(kParams, 1'000'000, 42, 1);
  const auto sched = kinc::schedule_2023();
  for (auto _ : state) benchmark::DoNotOptimize(kinc::tax_share_direct(pop.incomes, sched));
}
BENCHMARK(BM_TaxShare)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
