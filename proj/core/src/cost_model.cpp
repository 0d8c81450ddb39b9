#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ampsched/sim.hpp"

namespace ampsched {

// Indexed by TaskKind: C, T, S, G.
const Table3Costs kExynosTable3{
    .fast = {94.49, 48.27, 47.22, 89.43},
    .slow = {137.65, (216.70 + 207.41 + 230.07 + 216.95) / 4.0, (212.55 + 212.56 + 216.82) / 3.0,
             (406.25 + 408.90 + 415.31 + 410.84) / 4.0},
    .vc = {83.96, 42.99, 44.54, 79.22},
    .block_size = 448.0,
};

std::string_view to_string(MachineView view) { return view == MachineView::Gts ? "gts" : "vc"; }

MachineView parse_view(std::string_view text) {
  if (text == "gts") return MachineView::Gts;
  if (text == "vc") return MachineView::Vc;
  throw std::invalid_argument("unknown machine view '" + std::string(text) + "'");
}

std::string_view to_string(CostMode mode) {
  switch (mode) {
    case CostMode::Uniform: return "uniform";
    case CostMode::Flops: return "flops";
    case CostMode::Table3: return "table3";
  }
  return "?";
}

CostMode parse_cost_mode(std::string_view text) {
  if (text == "uniform") return CostMode::Uniform;
  if (text == "flops") return CostMode::Flops;
  if (text == "table3") return CostMode::Table3;
  throw std::invalid_argument("unknown cost model '" + std::string(text) + "'");
}

void MachineModel::validate() const {
  if (cores.empty()) throw std::invalid_argument("machine has no cores");
  std::size_t fast = 0, slow = 0;
  for (const Core& c : cores) {
    if (!(c.speed > 0.0) || !std::isfinite(c.speed))
      throw std::invalid_argument("core " + std::to_string(c.id) + " has a non-positive speed");
    (c.kind == CoreKind::Fast ? fast : slow) += 1;
  }
  if (view == MachineView::Vc && fast != slow)
    throw std::invalid_argument("VC view needs equal fast and slow core counts");
}

std::vector<SimResource> MachineModel::resources() const {
  validate();
  std::vector<SimResource> out;
  if (view == MachineView::Gts) {
    for (const Core& c : cores)
      out.push_back({c.kind == CoreKind::Fast ? Resource::FastLane : Resource::SlowLane, c.speed});
    return out;
  }
  std::vector<double> fast, slow;
  for (const Core& c : cores) (c.kind == CoreKind::Fast ? fast : slow).push_back(c.speed);
  for (std::size_t p = 0; p < fast.size(); ++p) out.push_back({Resource::VcPair, fast[p] + slow[p]});
  return out;
}

std::vector<WorkerDescriptor> MachineModel::workers() const {
  std::vector<WorkerDescriptor> out;
  const auto res = resources();
  for (std::size_t r = 0; r < res.size(); ++r)
    out.push_back({static_cast<std::uint32_t>(r), res[r].kind, std::nullopt});
  return out;
}

MachineModel exynos5422(MachineView view, std::size_t fast, std::size_t slow) {
  MachineModel m;
  m.name = "exynos5422";
  m.view = view;
  std::uint32_t id = 0;
  for (std::size_t c = 0; c < slow; ++c) m.cores.push_back({id++, CoreKind::Slow, kExynosSlowSpeed});
  for (std::size_t c = 0; c < fast; ++c) m.cores.push_back({id++, CoreKind::Fast, 1.0});
  m.validate();
  return m;
}

MachineModel uniform_machine(std::size_t count, double speed) {
  MachineModel m;
  m.name = "uniform";
  for (std::uint32_t c = 0; c < count; ++c) m.cores.push_back({c, CoreKind::Fast, speed});
  m.validate();
  return m;
}

CostModel CostModel::uniform(double unit_ns) {
  if (!(unit_ns > 0.0)) throw std::invalid_argument("uniform cost must be > 0");
  CostModel c;
  c.mode_ = CostMode::Uniform;
  c.unit_ns_ = unit_ns;
  return c;
}

double CostModel::default_flop_rate() { return 2.0 * 448.0 * 448.0 * 448.0 / (kExynosTable3.fast[3] * 1e-3); }

CostModel CostModel::flops(TileGeometry geom, double base_rate) {
  if (!(base_rate > 0.0)) throw std::invalid_argument("flop rate must be > 0");
  if (geom.b == 0 || geom.n == 0) throw std::invalid_argument("flops cost model needs n, b >= 1");
  CostModel c;
  c.mode_ = CostMode::Flops;
  c.rate_ = base_rate;
  c.geom_ = geom;
  return c;
}

CostModel CostModel::table3(std::optional<TileGeometry> geom, const Table3Costs& table) {
  if (geom && (geom->b == 0 || geom->n == 0)) throw std::invalid_argument("table3 cost model needs n, b >= 1");
  for (const auto* col : {&table.fast, &table.slow, &table.vc})
    for (double v : *col)
      if (!(v > 0.0)) throw std::invalid_argument("table3 costs must be > 0");
  CostModel c;
  c.mode_ = CostMode::Table3;
  c.geom_ = geom;
  c.table_ = table;
  return c;
}

std::int64_t CostModel::duration_ns(const Task& t, const SimResource& r) const {
  double ns = 0.0;
  switch (mode_) {
    case CostMode::Uniform:
      ns = unit_ns_ / r.speed;
      break;
    case CostMode::Flops:
      ns = task_flops(t, *geom_) / (r.speed * rate_) * 1e9;
      break;
    case CostMode::Table3: {
      const auto kind = static_cast<std::size_t>(t.kind);
      const double ms = r.kind == Resource::FastLane   ? table_.fast[kind]
                        : r.kind == Resource::SlowLane ? table_.slow[kind]
                                                       : table_.vc[kind];
      double scale = 1.0;
      if (geom_) {
        const double rel = static_cast<double>(geom_->b) / table_.block_size;
        scale = task_volume_ratio(t, *geom_) * rel * rel * rel;
      }
      ns = ms * 1e6 * scale;
      break;
    }
  }
  return std::max<std::int64_t>(1, std::llround(ns));
}

Preset preset_exynos5422(MachineView view, TileGeometry geom) {
  return {exynos5422(view), CostModel::table3(geom)};
}

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

double lane_seconds(std::size_t rows, std::size_t m, double rate) {
  return 2.0 * static_cast<double>(rows) * static_cast<double>(m) * static_cast<double>(m) / rate;
}

}  // namespace

double KernelTimingModel::seq_seconds(std::size_t m) const { return lane_seconds(m, m, rate_fast); }

double KernelTimingModel::asym_seconds(std::size_t m, const LaneConfig& cfg) const {
  const Loop3Split split = split_loop3(m, cfg);
  if (split.slow.empty()) return seq_seconds(m);
  const double fast = lane_seconds(split.fast.size(), m, rate_fast);
  const double slow = lane_seconds(split.slow.size(), m, rate_fast * cfg.speed_slow / cfg.speed_fast);
  const double panels = static_cast<double>(ceil_div(m, cfg.fast.kc) * ceil_div(m, cfg.fast.nc));
  return (1.0 + overhead) * std::max(fast, slow) + sync_seconds * panels;
}

KernelTimingModel exynos_timing_model(const LaneConfig& cfg) {
  KernelTimingModel model;
  model.rate_fast = CostModel::default_flop_rate();
  const double target = kExynosTable3.vc[3] * 1e-3;
  const double ideal = model.asym_seconds(448, cfg);
  const double sync = model.sync_seconds * static_cast<double>(ceil_div(448, cfg.fast.kc) * ceil_div(448, cfg.fast.nc));
  model.overhead = (target - sync) / (ideal - sync) - 1.0;
  return model;
}

std::vector<CrossoverRow> simulated_crossover(std::span<const std::size_t> sizes,
                                              const KernelTimingModel& model, const LaneConfig& cfg) {
  cfg.validate();
  std::vector<CrossoverRow> rows;
  for (std::size_t m : sizes) {
    if (m == 0) throw std::invalid_argument("crossover sizes must be >= 1");
    const double md = static_cast<double>(m);
    rows.push_back({m, 2.0 * md * md * md, model.seq_seconds(m), model.asym_seconds(m, cfg)});
  }
  return rows;
}

}  // namespace ampsched
