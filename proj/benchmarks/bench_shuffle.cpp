#include <benchmark/benchmark.h>

#include "shufflesgd/permutation.hpp"

using namespace shufflesgd;

static void BM_Next(benchmark::State& state) {
  RngStream s = derive_stream(0, 0, 0);
  for (auto _ : state) benchmark::DoNotOptimize(s.next());
}
BENCHMARK(BM_Next);

static void BM_Bounded(benchmark::State& state) {
  RngStream s = derive_stream(0, 0, 0);
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(s.bounded(n));
}
BENCHMARK(BM_Bounded)->Arg(7)->Arg(256)->Arg(1 << 30);

static void BM_ShuffleInto(benchmark::State& state) {
  RngStream s = derive_stream(0, 0, 0);
  Permutation p = Permutation::identity(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    shuffle_into(s, p);
    benchmark::DoNotOptimize(p.values().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ShuffleInto)->RangeMultiplier(4)->Range(16, 4096);

static void BM_DeriveStream(benchmark::State& state) {
  std::uint64_t r = 0;
  for (auto _ : state) benchmark::DoNotOptimize(derive_stream(1, 2, r++).state());
}
BENCHMARK(BM_DeriveStream);
