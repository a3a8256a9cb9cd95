#include <benchmark/benchmark.h>

#include "shufflesgd/permstats.hpp"

using namespace shufflesgd::permstats;

static void BM_ExactDistribution(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(exact_distribution(n, n / 2).pmf.size());
}
BENCHMARK(BM_ExactDistribution)->Arg(16)->Arg(64)->Arg(256);

static void BM_BruteForce(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_bruteforce(n, n / 2).pmf.size());
}
BENCHMARK(BM_BruteForce)->Arg(8)->Arg(12)->Arg(16);

static void BM_BoundsRow(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(lemma13_row(256, 128).ok());
}
BENCHMARK(BM_BoundsRow);

static void BM_BoundsCheckAll(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(check_lemma13(256).violations);
}
BENCHMARK(BM_BoundsCheckAll)->Unit(benchmark::kMillisecond);
