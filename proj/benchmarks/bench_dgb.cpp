#include <benchmark/benchmark.h>

#include "dgbfit/dgb.hpp"
#include "dgbfit/estimation.hpp"
#include "dgbfit/gof.hpp"
#include "dgbfit/synth.hpp"

namespace {

void BM_LogNormalizer(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dgbfit::log_normalizer(0.252, 0.872, n));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LogNormalizer)->RangeMultiplier(8)->Range(64, 1 << 17)->Complexity();

void BM_Entropy(benchmark::State& state) {
  const dgbfit::DgbParams params(0.252, 0.872,
                                 static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dgbfit::entropy(params));
  }
}
BENCHMARK(BM_Entropy)->Arg(640)->Arg(10000);

void BM_KsMeasure(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto series = dgbfit::exact_series(0.25, 0.85, n, 1e6);
  const dgbfit::DgbParams params(0.25, 0.85, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dgbfit::ks_measure(series, params));
  }
}
BENCHMARK(BM_KsMeasure)->Arg(640);

void BM_FitMle(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto series = dgbfit::sampled_series(0.25, 0.85, n, 1000000, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dgbfit::fit_mle(series));
  }
}
BENCHMARK(BM_FitMle)->Arg(30)->Arg(640)->Unit(benchmark::kMillisecond);

void BM_Sample(benchmark::State& state) {
  const dgbfit::DgbParams params(0.5, 0.5, 640);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        dgbfit::sample(params, static_cast<std::size_t>(state.range(0)), 7));
  }
}
BENCHMARK(BM_Sample)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
