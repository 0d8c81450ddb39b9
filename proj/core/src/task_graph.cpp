#include "ampsched/task_graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace ampsched {

char kind_letter(TaskKind kind) {
  switch (kind) {
    case TaskKind::Potrf: return 'C';
    case TaskKind::Trsm: return 'T';
    case TaskKind::Syrk: return 'S';
    case TaskKind::Gemm: return 'G';
  }
  return '?';
}

TaskKind kind_from_letter(char letter) {
  switch (letter) {
    case 'C': return TaskKind::Potrf;
    case 'T': return TaskKind::Trsm;
    case 'S': return TaskKind::Syrk;
    case 'G': return TaskKind::Gemm;
    default: throw std::invalid_argument(std::string("unknown task kind '") + letter + "'");
  }
}

std::span<const TaskId> TaskGraph::successors(TaskId id) const {
  if (id >= tasks_.size()) throw std::out_of_range("successors: bad task id");
  return {succ_.data() + succ_offsets_[id], succ_offsets_[id + 1] - succ_offsets_[id]};
}

std::span<const TaskId> TaskGraph::predecessors(TaskId id) const {
  if (id >= tasks_.size()) throw std::out_of_range("predecessors: bad task id");
  return {pred_.data() + pred_offsets_[id], pred_offsets_[id + 1] - pred_offsets_[id]};
}

void TaskGraph::index_edges() {
  std::sort(edges_.begin(), edges_.end());
  const std::size_t n = tasks_.size();
  succ_offsets_.assign(n + 1, 0);
  pred_offsets_.assign(n + 1, 0);
  for (const Edge& e : edges_) {
    ++succ_offsets_[e.pred + 1];
    ++pred_offsets_[e.succ + 1];
  }
  for (std::size_t t = 0; t < n; ++t) {
    succ_offsets_[t + 1] += succ_offsets_[t];
    pred_offsets_[t + 1] += pred_offsets_[t];
  }
  succ_.resize(edges_.size());
  pred_.resize(edges_.size());
  std::vector<std::size_t> sfill(succ_offsets_.begin(), succ_offsets_.end() - 1);
  std::vector<std::size_t> pfill(pred_offsets_.begin(), pred_offsets_.end() - 1);
  // edges_ is sorted by (pred, succ), so both adjacency lists come out sorted.
  for (const Edge& e : edges_) {
    succ_[sfill[e.pred]++] = e.succ;
    pred_[pfill[e.succ]++] = e.pred;
  }
}

TaskGraph TaskGraph::from_parts(std::vector<Task> tasks, std::vector<Edge> edges,
                                std::size_t block_count) {
  for (std::size_t t = 0; t < tasks.size(); ++t)
    if (tasks[t].id != t) throw std::invalid_argument("task ids must be dense and in order");
  for (const Edge& e : edges) {
    if (e.pred >= tasks.size() || e.succ >= tasks.size())
      throw std::invalid_argument("edge references an unknown task");
    if (e.pred >= e.succ)
      throw std::invalid_argument("edge " + std::to_string(e.pred) + "->" +
                                  std::to_string(e.succ) + " does not follow program order");
  }
  TaskGraph g;
  g.tasks_ = std::move(tasks);
  g.edges_ = std::move(edges);
  g.block_count_ = block_count;
  g.index_edges();
  if (std::adjacent_find(g.edges_.begin(), g.edges_.end()) != g.edges_.end())
    throw std::invalid_argument("duplicate edge");
  return g;
}

TaskId GraphBuilder::register_task(TaskKind kind, std::uint32_t k, std::uint32_t i,
                                   std::uint32_t j, std::vector<BlockCoord> reads,
                                   BlockCoord write) {
  const auto id = static_cast<TaskId>(tasks_.size());
  std::vector<TaskId> preds;

  auto writer_of = [&](BlockCoord blk) {
    if (auto it = last_writer_.find(blk); it != last_writer_.end()) preds.push_back(it->second);
  };
  for (const BlockCoord& blk : reads) writer_of(blk);
  writer_of(write);
  if (auto it = readers_.find(write); it != readers_.end())
    preds.insert(preds.end(), it->second.begin(), it->second.end());

  std::sort(preds.begin(), preds.end());
  preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
  for (TaskId p : preds) edges_.push_back({p, id});

  for (const BlockCoord& blk : reads)
    if (blk != write) readers_[blk].push_back(id);
  last_writer_[write] = id;
  readers_[write].clear();

  tasks_.push_back(Task{id, kind, k, i, j, std::move(reads), write});
  return id;
}

TaskGraph GraphBuilder::finish(std::size_t block_count) && {
  return TaskGraph::from_parts(std::move(tasks_), std::move(edges_), block_count);
}

TaskGraph build_cholesky_dag(std::size_t s) {
  if (s == 0) throw std::invalid_argument("build_cholesky_dag: s must be >= 1");
  GraphBuilder b;
  using U = std::uint32_t;
  for (U k = 0; k < s; ++k) {
    b.register_task(TaskKind::Potrf, k, k, k, {{k, k}}, {k, k});
    for (U j = k + 1; j < s; ++j) b.register_task(TaskKind::Trsm, k, k, j, {{k, k}, {k, j}}, {k, j});
    for (U i = k + 1; i < s; ++i) {
      b.register_task(TaskKind::Syrk, k, i, i, {{k, i}, {i, i}}, {i, i});
      for (U j = i + 1; j < s; ++j)
        b.register_task(TaskKind::Gemm, k, i, j, {{k, i}, {k, j}, {i, j}}, {i, j});
    }
  }
  return std::move(b).finish(s);
}

TaskCounts task_counts(std::size_t s) {
  if (s == 0) throw std::invalid_argument("task_counts: s must be >= 1");
  const std::size_t pairs = s * (s - 1) / 2;
  return {s, pairs, pairs, s * (s - 1) * (s - 2) / 6};
}

TaskCounts count_kinds(const TaskGraph& g) {
  TaskCounts c;
  for (const Task& t : g.tasks()) {
    switch (t.kind) {
      case TaskKind::Potrf: ++c.potrf; break;
      case TaskKind::Trsm: ++c.trsm; break;
      case TaskKind::Syrk: ++c.syrk; break;
      case TaskKind::Gemm: ++c.gemm; break;
    }
  }
  return c;
}

std::vector<double> bottom_levels(const TaskGraph& g, const TaskCost& cost) {
  std::vector<double> bl(g.size(), 0.0);
  // Edges only point forward in id order, so reverse id order is a reverse
  // topological order.
  for (std::size_t t = g.size(); t-- > 0;) {
    double best = 0.0;
    for (TaskId s : g.successors(static_cast<TaskId>(t))) best = std::max(best, bl[s]);
    bl[t] = cost(g.task(static_cast<TaskId>(t))) + best;
  }
  return bl;
}

double critical_path(const TaskGraph& g, const TaskCost& cost) {
  const auto bl = bottom_levels(g, cost);
  return bl.empty() ? 0.0 : *std::max_element(bl.begin(), bl.end());
}

namespace {

struct Extents {
  double k, i, j;
};

Extents extents(const Task& t, const TileGeometry& g) {
  return {static_cast<double>(g.extent(t.k)), static_cast<double>(g.extent(t.i)),
          static_cast<double>(g.extent(t.j))};
}

}  // namespace

double task_flops(const Task& t, const TileGeometry& geom) {
  const Extents e = extents(t, geom);
  switch (t.kind) {
    case TaskKind::Potrf: return e.k * e.k * e.k / 3.0;
    case TaskKind::Trsm: return e.k * e.k * e.j;
    case TaskKind::Syrk: return e.i * e.i * e.k;
    case TaskKind::Gemm: return 2.0 * e.i * e.j * e.k;
  }
  return 0.0;
}

double task_volume_ratio(const Task& t, const TileGeometry& geom) {
  const Extents e = extents(t, geom);
  const double b = static_cast<double>(geom.b);
  const double b3 = b * b * b;
  switch (t.kind) {
    case TaskKind::Potrf: return e.k * e.k * e.k / b3;
    case TaskKind::Trsm: return e.k * e.k * e.j / b3;
    case TaskKind::Syrk: return e.i * e.i * e.k / b3;
    case TaskKind::Gemm: return e.i * e.j * e.k / b3;
  }
  return 1.0;
}

}  // namespace ampsched
