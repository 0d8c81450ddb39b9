#include <random>

#include "ampsched/runtime.hpp"
#include "ampsched/sim.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ampsched;

namespace {

TaskGraph chain(std::size_t n) {
  GraphBuilder b;
  for (std::uint32_t t = 0; t < n; ++t) b.register_task(TaskKind::Gemm, 0, 0, 0, {{0, 0}}, {0, 0});
  return std::move(b).finish();
}

TaskGraph independent(std::size_t n) {
  GraphBuilder b;
  for (std::uint32_t t = 0; t < n; ++t) b.register_task(TaskKind::Gemm, 0, t, t, {}, {t, t});
  return std::move(b).finish();
}

bool same_result(const SimResult& a, const SimResult& b) {
  if (a.makespan_ns != b.makespan_ns || a.trace.events.size() != b.trace.events.size()) return false;
  for (std::size_t n = 0; n < a.trace.events.size(); ++n) {
    const auto& x = a.trace.events[n];
    const auto& y = b.trace.events[n];
    if (x.task != y.task || x.worker != y.worker || x.start_ns != y.start_ns || x.end_ns != y.end_ns) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("sim") {
  TEST_CASE("machine presets") {
    const MachineModel gts = exynos5422(MachineView::Gts);
    const MachineModel vc = exynos5422(MachineView::Vc);
    CHECK(gts.resources().size() == 8);
    CHECK(vc.resources().size() == 4);
    CHECK(gts.cores[0].kind == CoreKind::Slow);
    CHECK(gts.cores[7].kind == CoreKind::Fast);
    CHECK(vc.resources()[0].kind == Resource::VcPair);
    CHECK_THROWS_AS(exynos5422(MachineView::Vc, 4, 2), std::invalid_argument);
    MachineModel bad = uniform_machine(2);
    bad.cores[1].speed = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }

  TEST_CASE("measured Exynos cost model ratios and scaling") {
    const CostModel cost = CostModel::table3(TileGeometry{448 * 3, 448});
    const Task g{0, TaskKind::Gemm, 0, 1, 2, {}, {1, 2}};
    const double fast = static_cast<double>(cost.duration_ns(g, {Resource::FastLane, 1.0}));
    const double slow = static_cast<double>(cost.duration_ns(g, {Resource::SlowLane, 0.2}));
    const double vc = static_cast<double>(cost.duration_ns(g, {Resource::VcPair, 1.2}));
    CHECK(fast == 89430000.0);
    CHECK(slow / fast == doctest::Approx(410.325 / 89.43).epsilon(1e-9));
    CHECK(slow / fast == doctest::Approx(4.59).epsilon(0.005));
    CHECK(fast / vc == doctest::Approx(1.129).epsilon(0.001));

    // Block size 224 runs an eighth of the work per tile.
    const CostModel half = CostModel::table3(TileGeometry{224 * 3, 224});
    CHECK(half.duration_ns(g, {Resource::FastLane, 1.0}) == 11178750);
    // Ragged last tile: 448 x 448 x 320.
    const CostModel ragged = CostModel::table3(TileGeometry{448 * 2 + 320, 448});
    CHECK(ragged.duration_ns(g, {Resource::FastLane, 1.0}) == std::llround(89.43e6 * 320.0 / 448.0));
    for (TaskKind k : {TaskKind::Potrf, TaskKind::Trsm, TaskKind::Syrk, TaskKind::Gemm})
      for (Resource r : {Resource::FastLane, Resource::SlowLane, Resource::VcPair}) {
        const Task t{0, k, 0, 0, 0, {}, {0, 0}};
        CHECK(cost.duration_ns(t, {r, 1.0}) > 0);
      }
  }

  TEST_CASE("flops and uniform cost models") {
    const CostModel flops = CostModel::flops(TileGeometry{896, 448});
    const Task g{0, TaskKind::Gemm, 0, 0, 1, {}, {0, 1}};
    CHECK(flops.duration_ns(g, {Resource::FastLane, 1.0}) == 89430000);
    CHECK(flops.duration_ns(g, {Resource::FastLane, 0.5}) == 178860000);
    const CostModel unit = CostModel::uniform(10.0);
    CHECK(unit.duration_ns(g, {Resource::SlowLane, 2.0}) == 5);
    CHECK(parse_cost_mode("flops") == CostMode::Flops);
    CHECK_THROWS_AS(parse_cost_mode("energy"), std::invalid_argument);
  }

  TEST_CASE("small makespans") {
    const CostModel unit = CostModel::uniform(1.0);
    CHECK(simulate(chain(3), uniform_machine(1), unit, Policy::oblivious()).makespan_ns == 3);
    CHECK(simulate(independent(4), uniform_machine(2), unit, Policy::oblivious()).makespan_ns == 2);
    const SimResult r = simulate(independent(4), uniform_machine(2), unit, Policy::oblivious());
    CHECK(r.mean_idle_fraction() == 0.0);
  }

  TEST_CASE("policy must fit the view") {
    const TaskGraph g = build_cholesky_dag(3);
    const CostModel cost = CostModel::table3(std::nullopt);
    CHECK_THROWS_AS(simulate(g, exynos5422(MachineView::Gts), cost, Policy::vc()), std::invalid_argument);
    CHECK_THROWS_AS(simulate(g, exynos5422(MachineView::Vc), cost, Policy::cats()), std::invalid_argument);
    CHECK_THROWS_AS(simulate(g, exynos5422(MachineView::Vc), cost, Policy::oblivious()), std::invalid_argument);
  }

  TEST_CASE("lower bounds") {
    const CostModel unit = CostModel::uniform(1.0);
    const LowerBounds one = lower_bounds(chain(1), uniform_machine(3), unit);
    CHECK(one.cp_ns == 1);
    const LowerBounds s4 = lower_bounds(build_cholesky_dag(4), uniform_machine(1), unit);
    CHECK(s4.work_ns == 20.0);
    CHECK(s4.cp_ns == 10);
    const LowerBounds single = lower_bounds(chain(1), uniform_machine(1), unit);
    CHECK(single.work_ns == 1.0);
  }

  TEST_CASE("preset s = 14 results respect the bounds and trace rules") {
    const TileGeometry geom{6144, 448};
    const TaskGraph g = build_cholesky_dag(geom.block_count());
    for (MachineView view : {MachineView::Gts, MachineView::Vc}) {
      const Preset p = preset_exynos5422(view, geom);
      const LowerBounds lb = lower_bounds(g, p.machine, p.cost);
      const std::vector<Policy> policies =
          view == MachineView::Vc ? std::vector<Policy>{Policy::vc()}
                                  : std::vector<Policy>{Policy::oblivious(), Policy::cats(), Policy::cats(0.9, Stealing::Uni)};
      for (const Policy& pol : policies) {
        const SimResult r = simulate(g, p.machine, p.cost, pol);
        CHECK(static_cast<double>(r.makespan_ns) >= lb.bound_ns() - 1.0);
        CHECK(validate_trace(r.trace, g).empty());
        for (const auto& u : r.utilization) {
          CHECK(u.idle >= 0.0);
          CHECK(u.idle <= 1.0);
        }
        CHECK(same_result(r, simulate(g, p.machine, p.cost, pol)));
      }
    }
  }

  TEST_CASE("CATS in simulation keeps critical work off slow cores without bi stealing") {
    const TileGeometry geom{6144, 448};
    const TaskGraph g = build_cholesky_dag(geom.block_count());
    const Preset p = preset_exynos5422(MachineView::Gts, geom);
    const auto res = p.machine.resources();
    for (Stealing st : {Stealing::None, Stealing::Uni}) {
      const SimResult r = simulate(g, p.machine, p.cost, Policy::cats(0.9, st));
      for (const auto& e : r.trace.events)
        if (res[e.worker].kind == Resource::SlowLane) CHECK_FALSE(e.from_critical);
    }
  }

  TEST_CASE("adding a core never slows OBLIVIOUS on independent tasks") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> kinds(0, 3);
    for (int trial = 0; trial < 20; ++trial) {
      GraphBuilder b;
      const std::uint32_t n = 5 + static_cast<std::uint32_t>(trial);
      for (std::uint32_t t = 0; t < n; ++t)
        b.register_task(static_cast<TaskKind>(kinds(rng)), 0, t % 4, t % 4, {}, {t, t});
      const TaskGraph g = std::move(b).finish();
      const CostModel cost = CostModel::table3(std::nullopt);
      std::int64_t prev = std::numeric_limits<std::int64_t>::max();
      for (std::size_t cores = 1; cores <= 8; ++cores) {
        const std::int64_t ms = simulate(g, exynos5422(MachineView::Gts, cores, 0), cost, Policy::oblivious()).makespan_ns;
        CHECK(ms <= prev);
        prev = ms;
      }
    }
  }

  // Holds for s <= 18 only. Beyond that GTS-8 throughput (about 4.9 fast
  // cores) beats VC throughput (about 4.5) once the DAG is wide enough.
  TEST_CASE("VC beats GTS OBLIVIOUS on 8 cores for 8 <= s <= 18") {
    for (std::size_t s : {8u, 10u, 14u, 18u}) {
      const TileGeometry geom{448 * s, 448};
      const TaskGraph g = build_cholesky_dag(s);
      const CostModel cost = CostModel::table3(geom);
      const auto vc = simulate(g, exynos5422(MachineView::Vc), cost, Policy::vc());
      const auto obl = simulate(g, exynos5422(MachineView::Gts), cost, Policy::oblivious());
      CAPTURE(s);
      CHECK(vc.makespan_ns < obl.makespan_ns);
    }
  }

  TEST_CASE("simulated kernel timing model") {
    const KernelTimingModel model = exynos_timing_model();
    CHECK(model.seq_seconds(448) == doctest::Approx(0.08943).epsilon(1e-12));
    CHECK(model.asym_seconds(448, LaneConfig{}) == doctest::Approx(0.07922).epsilon(1e-12));
    CHECK(model.overhead > 0.0);
    // Folded split runs the sequential kernel.
    CHECK(model.asym_seconds(32, LaneConfig{}) == model.seq_seconds(32));
    const std::vector<std::size_t> sizes{64, 128, 256};
    const auto rows = simulated_crossover(sizes, model);
    CHECK(rows.size() == 3);
    CHECK(rows[2].asym_seconds < rows[2].seq_seconds);
  }

  TEST_CASE("random DAG fuzz respects lower bounds") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
      const TaskGraph g = oracle::random_dag(rng, 30, 4, 0.1);
      const CostModel cost = CostModel::table3(std::nullopt);
      const Preset p{exynos5422(MachineView::Gts), cost};
      const auto r = simulate(g, p.machine, cost, Policy::cats());
      CHECK(static_cast<double>(r.makespan_ns) >= lower_bounds(g, p.machine, cost).bound_ns() - 1.0);
    }
  }

  TEST_CASE("simulated traces feed the same trace tooling") {
    const TaskGraph g = build_cholesky_dag(4);
    const auto r = simulate(g, exynos5422(MachineView::Vc), CostModel::table3(TileGeometry{1792, 448}), Policy::vc());
    const Trace back = trace_from_json(trace_to_json(r.trace));
    CHECK(back.events.size() == 20);
    CHECK(back.wall_end_ns == r.makespan_ns);
    CHECK(validate_trace(back, g).empty());
  }
}
