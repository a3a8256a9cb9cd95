#include <benchmark/benchmark.h>

#include "shufflesgd/engine.hpp"
#include "shufflesgd/harness.hpp"

using namespace shufflesgd;

namespace {

RunConfig make_config(std::size_t n, std::size_t k) {
  RunConfig c;
  c.n = n;
  c.k_epochs = k;
  c.regime = StepSizeRegime::c_log_t_over_t(4.0);
  return c;
}

void run_family(benchmark::State& state, const Family& f) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RunConfig c = make_config(n, 16);
  std::uint64_t r = 0;
  for (auto _ : state) {
    c.lineage = {0, 0, r++};
    benchmark::DoNotOptimize(run_sgdo(f, c).final_sq_error);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * 16));
}

}  // namespace

static void BM_RunPiecewise(benchmark::State& state) {
  run_family(state, build_family(PiecewiseRecipe{}, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_RunPiecewise)->Arg(64)->Arg(256)->Arg(1024);

static void BM_RunProduct2D(benchmark::State& state) {
  run_family(state, build_family(Product2DRecipe{}, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_RunProduct2D)->Arg(64)->Arg(256);

static void BM_RunQuadratic4D(benchmark::State& state) {
  QuadraticRecipe q;
  q.hessian = {2, 0, 0, 0, 0, 1, 0, 0, 0, 0, 3, 0, 0, 0, 0, 1.5};
  q.base_linear = {1, 0, -1, 0};
  run_family(state, build_family(q, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_RunQuadratic4D)->Arg(64)->Arg(256);

static void BM_SweepPoint(benchmark::State& state) {
  harness::SweepConfig c;
  c.fixed = 256;
  c.grid = {32};
  c.repeats = 16;
  c.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(harness::run_sweep(c).points.front().mean_sq_error);
}
BENCHMARK(BM_SweepPoint)->Unit(benchmark::kMillisecond);
