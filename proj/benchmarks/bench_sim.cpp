#include <benchmark/benchmark.h>

#include "ampsched/sim.hpp"

using namespace ampsched;

namespace {

void BM_BuildDag(benchmark::State& state) {
  const auto s = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_cholesky_dag(s).size());
}
BENCHMARK(BM_BuildDag)->Arg(14)->Arg(32)->Arg(64);

void BM_Simulate(benchmark::State& state) {
  const auto s = static_cast<std::size_t>(state.range(0));
  const Policy policies[] = {Policy::oblivious(), Policy::cats(), Policy::vc()};
  const Policy& p = policies[state.range(1)];
  const MachineView view = p.kind == PolicyKind::Vc ? MachineView::Vc : MachineView::Gts;
  const Preset preset = preset_exynos5422(view, TileGeometry{448 * s, 448});
  const TaskGraph g = build_cholesky_dag(s);
  for (auto _ : state) benchmark::DoNotOptimize(simulate(g, preset.machine, preset.cost, p).makespan_ns);
  state.SetLabel(std::string(to_string(p.kind)));
}
BENCHMARK(BM_Simulate)->ArgsProduct({{14, 32}, {0, 1, 2}});

}  // namespace
