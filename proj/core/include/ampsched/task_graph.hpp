#pragma once

// Task DAG of the blocked right-looking upper Cholesky factorization.
//
// Tasks are registered in sequential program order together with the blocks
// they read and the single block they write; dependencies come from the
// last writer / readers-since-last-write tables, exactly like an in/out/inout
// dataflow runtime. Edges are kept unreduced.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ampsched {

enum class TaskKind : std::uint8_t {
  Potrf,  // C: factor the diagonal block
  Trsm,   // T: triangular solve of a panel block
  Syrk,   // S: symmetric update of a diagonal block
  Gemm,   // G: general update of an off-diagonal block
};

inline constexpr std::size_t kTaskKindCount = 4;

char kind_letter(TaskKind kind);
TaskKind kind_from_letter(char letter);  // throws std::invalid_argument

using TaskId = std::uint32_t;

struct BlockCoord {
  std::uint32_t row = 0;
  std::uint32_t col = 0;

  friend auto operator<=>(const BlockCoord&, const BlockCoord&) = default;
};

struct Task {
  TaskId id = 0;
  TaskKind kind = TaskKind::Potrf;
  /// Iteration index and target block (i, j).
  std::uint32_t k = 0;
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  std::vector<BlockCoord> reads;
  BlockCoord write;
};

struct Edge {
  TaskId pred = 0;
  TaskId succ = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable once built; safe to share between threads.
class TaskGraph {
 public:
  TaskGraph() = default;

  std::size_t size() const { return tasks_.size(); }
  const std::vector<Task>& tasks() const { return tasks_; }
  const Task& task(TaskId id) const { return tasks_.at(id); }
  /// Sorted by (pred, succ).
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const TaskId> successors(TaskId id) const;
  std::span<const TaskId> predecessors(TaskId id) const;
  std::size_t indegree(TaskId id) const { return predecessors(id).size(); }

  /// Block count of the Cholesky grid this graph was built for, 0 if hand-built.
  std::size_t block_count() const { return block_count_; }

  /// Rebuilds a graph from explicit tasks and edges (JSON ingestion path).
  /// Validates ids, forward-only edges and duplicates.
  static TaskGraph from_parts(std::vector<Task> tasks, std::vector<Edge> edges,
                              std::size_t block_count);

 private:
  friend class GraphBuilder;
  void index_edges();

  std::vector<Task> tasks_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> succ_offsets_;
  std::vector<TaskId> succ_;
  std::vector<std::size_t> pred_offsets_;
  std::vector<TaskId> pred_;
  std::size_t block_count_ = 0;
};

class GraphBuilder {
 public:
  /// Appends a task, adding RAW/WAW edges from the last writer of every block
  /// in reads and write, and WAR edges from readers of `write` registered since
  /// its last write.
  TaskId register_task(TaskKind kind, std::uint32_t k, std::uint32_t i, std::uint32_t j,
                       std::vector<BlockCoord> reads, BlockCoord write);

  std::size_t size() const { return tasks_.size(); }
  TaskGraph finish(std::size_t block_count = 0) &&;

 private:
  std::vector<Task> tasks_;
  std::vector<Edge> edges_;
  std::map<BlockCoord, TaskId> last_writer_;
  std::map<BlockCoord, std::vector<TaskId>> readers_;
};

/// Replays the blocked loop nest for an s x s tile grid.
TaskGraph build_cholesky_dag(std::size_t s);

struct TaskCounts {
  std::size_t potrf = 0;
  std::size_t trsm = 0;
  std::size_t syrk = 0;
  std::size_t gemm = 0;

  std::size_t total() const { return potrf + trsm + syrk + gemm; }
  friend bool operator==(const TaskCounts&, const TaskCounts&) = default;
};

/// Closed forms: C = s, T = S = s(s-1)/2, G = s(s-1)(s-2)/6.
TaskCounts task_counts(std::size_t s);
TaskCounts count_kinds(const TaskGraph& g);

using TaskCost = std::function<double(const Task&)>;

/// bl(t) = cost(t) + max over successors bl(succ).
std::vector<double> bottom_levels(const TaskGraph& g, const TaskCost& cost);
double critical_path(const TaskGraph& g, const TaskCost& cost);

/// Tile extents of an n x n matrix cut into b x b tiles (last one ragged).
struct TileGeometry {
  std::size_t n = 0;
  std::size_t b = 0;

  std::size_t block_count() const { return (n + b - 1) / b; }
  std::size_t extent(std::size_t t) const {
    return t + 1 < block_count() ? b : n - (block_count() - 1) * b;
  }
};

/// Flop count of a task's kernel on its actual tile extents.
double task_flops(const Task& t, const TileGeometry& geom);
/// Product of the three extents the kernel's work scales with, divided by b^3;
/// 1 for full tiles.
double task_volume_ratio(const Task& t, const TileGeometry& geom);

std::string export_dot(const TaskGraph& g);
std::string graph_to_json(const TaskGraph& g, std::optional<TileGeometry> geom = std::nullopt);

struct LoadedGraph {
  TaskGraph graph;
  std::optional<TileGeometry> geometry;
};
/// Parses graph_to_json output. Throws std::invalid_argument with a line number.
LoadedGraph graph_from_json(std::string_view text);

}  // namespace ampsched
