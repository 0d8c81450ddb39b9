#include <benchmark/benchmark.h>

#include <random>

#include "ampsched/blis.hpp"
#include "ampsched/dense.hpp"
#include "ampsched/runtime.hpp"

using namespace ampsched;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols) {
  std::mt19937_64 rng(rows * 131 + cols);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = dist(rng);
  return m;
}

void set_flops(benchmark::State& state, double flops) {
  state.counters["GFLOPS"] =
      benchmark::Counter(flops * 1e-9, benchmark::Counter::kIsIterationInvariantRate);
}

void BM_GemmBlocked(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(m, m), b = random_matrix(m, m);
  Matrix c(m, m);
  for (auto _ : state) {
    gemm_blocked(a.view(), b.view(), c.view(), kFastCacheParams);
    benchmark::DoNotOptimize(c.data().data());
  }
  set_flops(state, 2.0 * m * m * m);
}
BENCHMARK(BM_GemmBlocked)->Arg(64)->Arg(128)->Arg(256)->Arg(448);

void BM_GemmAsym(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Matrix a = random_matrix(m, m), b = random_matrix(m, m);
  Matrix c(m, m);
  const LaneConfig cfg;
  LanePair lanes;
  for (auto _ : state) {
    gemm_asym(a.view(), b.view(), c.view(), cfg, lanes);
    benchmark::DoNotOptimize(c.data().data());
  }
  set_flops(state, 2.0 * m * m * m);
}
BENCHMARK(BM_GemmAsym)->Arg(64)->Arg(128)->Arg(256)->Arg(448)->UseRealTime();

void BM_Cholesky(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto b = static_cast<std::size_t>(state.range(1));
  const Matrix a = make_spd(n, 1);
  const TaskGraph g = build_cholesky_dag((n + b - 1) / b);
  const Policy p = Policy::oblivious();
  const auto workers = make_workers(p, 2);
  for (auto _ : state) {
    state.PauseTiming();
    BlockedMatrix m(a, b);
    state.ResumeTiming();
    run(g, m, p, workers);
  }
  const double nd = static_cast<double>(n);
  set_flops(state, nd * nd * nd / 3.0);
}
BENCHMARK(BM_Cholesky)->Args({512, 64})->Args({512, 128})->Args({1024, 128})->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
