#pragma once

// Deterministic discrete-event replay of a task DAG on a modeled asymmetric
// machine. Time is integer nanoseconds.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ampsched/blis.hpp"
#include "ampsched/scheduling.hpp"
#include "ampsched/task_graph.hpp"
#include "ampsched/trace.hpp"

namespace ampsched {

enum class CoreKind { Fast, Slow };
enum class MachineView { Gts, Vc };

std::string_view to_string(MachineView view);
MachineView parse_view(std::string_view text);

struct Core {
  std::uint32_t id = 0;
  CoreKind kind = CoreKind::Fast;
  double speed = 1.0;
};

/// One schedulable unit: a core (GTS view) or a fast+slow pair (VC view).
struct SimResource {
  Resource kind = Resource::FastLane;
  /// Relative throughput; a pair's speed is the sum of its members.
  double speed = 1.0;
};

struct MachineModel {
  std::string name = "custom";
  std::vector<Core> cores;
  MachineView view = MachineView::Gts;

  /// Speeds > 0; VC view needs as many slow as fast cores.
  void validate() const;
  /// GTS: one resource per core in core-id order. VC: the i-th fast core
  /// paired with the i-th slow core, in fast-core order.
  std::vector<SimResource> resources() const;
  std::vector<WorkerDescriptor> workers() const;
};

/// Exynos 5422 layout: slow (Cortex-A7) cores take ids 0..slow-1, fast
/// (Cortex-A15) cores follow. Slow speed is the GEMM fast/slow time ratio.
MachineModel exynos5422(MachineView view, std::size_t fast = 4, std::size_t slow = 4);
/// `count` identical fast cores of the given speed.
MachineModel uniform_machine(std::size_t count, double speed = 1.0);

enum class CostMode { Uniform, Flops, Table3 };

std::string_view to_string(CostMode mode);
CostMode parse_cost_mode(std::string_view text);

/// Mean per-task milliseconds at block size `block_size`, indexed by TaskKind.
struct Table3Costs {
  std::array<double, kTaskKindCount> fast{};
  std::array<double, kTaskKindCount> slow{};
  std::array<double, kTaskKindCount> vc{};
  double block_size = 448.0;
};

/// Exynos 5422 measurements for b = 448. Slow entries average the per-worker
/// values available for the slow cluster.
extern const Table3Costs kExynosTable3;

class CostModel {
 public:
  /// Every task costs `unit_ns / speed`.
  static CostModel uniform(double unit_ns = 1.0);
  /// flops / (speed * base_rate); default rate makes a 448 GEMM take the
  /// fast-core mean of kExynosTable3.
  static CostModel flops(TileGeometry geom, double base_rate = default_flop_rate());
  /// Measured means scaled by tile volume relative to `table.block_size`;
  /// without geometry every tile counts as a full one.
  static CostModel table3(std::optional<TileGeometry> geom, const Table3Costs& table = kExynosTable3);

  static double default_flop_rate();

  CostMode mode() const { return mode_; }
  const std::optional<TileGeometry>& geometry() const { return geom_; }

  /// Always >= 1 ns.
  std::int64_t duration_ns(const Task& t, const SimResource& r) const;

 private:
  CostMode mode_ = CostMode::Uniform;
  double unit_ns_ = 1.0;
  double rate_ = 0.0;
  std::optional<TileGeometry> geom_;
  Table3Costs table_{};
};

struct Preset {
  MachineModel machine;
  CostModel cost;
};

/// Exynos machine with measured Exynos task costs for an n x n matrix in b x b tiles.
Preset preset_exynos5422(MachineView view, TileGeometry geom);

struct SimResult {
  std::int64_t makespan_ns = 0;
  Trace trace;
  std::vector<WorkerUtilization> utilization;
  std::vector<KindDuration> kind_means;

  double makespan_seconds() const { return static_cast<double>(makespan_ns) * 1e-9; }
  double mean_idle_fraction() const { return mean_idle(utilization); }
};

/// Throws invalid_argument when the policy does not fit the machine view.
SimResult simulate(const TaskGraph& g, const MachineModel& machine, const CostModel& cost,
                   const Policy& policy);

struct LowerBounds {
  /// Longest path using each task's fastest duration.
  std::int64_t cp_ns = 0;
  /// Total fastest-duration work over the machine's aggregate rate.
  double work_ns = 0.0;

  double bound_ns() const { return std::max(static_cast<double>(cp_ns), work_ns); }
};

LowerBounds lower_bounds(const TaskGraph& g, const MachineModel& machine, const CostModel& cost);

/// Analytic timing of gemm_blocked (fast lane) against gemm_asym for square
/// sizes: lanes run at rate_fast * speed, the asymmetric call pays
/// (1 + overhead) on its slower lane plus sync_seconds per Loop-1/2 panel.
struct KernelTimingModel {
  double rate_fast = 0.0;
  double overhead = 0.0;
  double sync_seconds = 1e-4;

  double seq_seconds(std::size_t m) const;
  double asym_seconds(std::size_t m, const LaneConfig& cfg) const;
};

/// Rates and overhead fitted so a 448 GEMM takes the fast-core and VC means
/// of kExynosTable3.
KernelTimingModel exynos_timing_model(const LaneConfig& cfg = {});

std::vector<CrossoverRow> simulated_crossover(std::span<const std::size_t> sizes,
                                              const KernelTimingModel& model,
                                              const LaneConfig& cfg = {});

}  // namespace ampsched
