#include "oracles.hpp"

#include <algorithm>
#include <functional>

namespace ampsched::oracle {

std::vector<LoopTask> enumerate_loop_nest(std::size_t s) {
  std::vector<LoopTask> out;
  auto c = [](std::size_t r, std::size_t col) {
    return BlockCoord{static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(col)};
  };
  auto u = [](std::size_t v) { return static_cast<std::uint32_t>(v); };
  for (std::size_t k = 0; k < s; ++k) {
    out.push_back({TaskKind::Potrf, u(k), u(k), u(k), {c(k, k)}, c(k, k)});
    for (std::size_t j = k + 1; j < s; ++j) out.push_back({TaskKind::Trsm, u(k), u(k), u(j), {c(k, k), c(k, j)}, c(k, j)});
    for (std::size_t i = k + 1; i < s; ++i) {
      out.push_back({TaskKind::Syrk, u(k), u(i), u(i), {c(k, i), c(i, i)}, c(i, i)});
      for (std::size_t j = i + 1; j < s; ++j)
        out.push_back({TaskKind::Gemm, u(k), u(i), u(j), {c(k, i), c(k, j), c(i, j)}, c(i, j)});
    }
  }
  return out;
}

std::vector<Edge> pairwise_dependences(const std::vector<LoopTask>& tasks) {
  auto reads = [](const LoopTask& t, BlockCoord b) {
    return std::find(t.reads.begin(), t.reads.end(), b) != t.reads.end();
  };
  auto written_between = [&](std::size_t lo, std::size_t hi, BlockCoord b) {
    for (std::size_t r = lo + 1; r < hi; ++r)
      if (tasks[r].write == b) return true;
    return false;
  };
  std::vector<Edge> edges;
  for (std::size_t q = 0; q < tasks.size(); ++q)
    for (std::size_t p = 0; p < q; ++p) {
      const LoopTask& a = tasks[p];
      const LoopTask& b = tasks[q];
      const bool flow = (reads(b, a.write) || b.write == a.write) && !written_between(p, q, a.write);
      const bool anti = a.write != b.write && reads(a, b.write) && !written_between(p, q, b.write);
      if (flow || anti) edges.push_back({static_cast<TaskId>(p), static_cast<TaskId>(q)});
    }
  std::sort(edges.begin(), edges.end());
  return edges;
}

double longest_path_exhaustive(const TaskGraph& g, const std::vector<double>& cost) {
  double best = 0.0;
  std::function<void(TaskId, double)> walk = [&](TaskId t, double acc) {
    acc += cost[t];
    best = std::max(best, acc);
    for (TaskId s : g.successors(t)) walk(s, acc);
  };
  for (TaskId t = 0; t < g.size(); ++t)
    if (g.indegree(t) == 0) walk(t, 0.0);
  return best;
}

TaskGraph random_dag(std::mt19937_64& rng, std::size_t nodes, std::size_t s, double edge_prob) {
  std::uniform_int_distribution<std::uint32_t> coord(0, static_cast<std::uint32_t>(s - 1));
  std::uniform_int_distribution<int> kind(0, 3);
  std::bernoulli_distribution edge(edge_prob);
  std::vector<Task> tasks;
  for (std::size_t t = 0; t < nodes; ++t) {
    Task task;
    task.id = static_cast<TaskId>(t);
    task.kind = static_cast<TaskKind>(kind(rng));
    task.k = coord(rng);
    task.i = coord(rng);
    task.j = coord(rng);
    task.write = {task.i, task.j};
    task.reads = {task.write};
    tasks.push_back(task);
  }
  std::vector<Edge> edges;
  for (std::size_t q = 1; q < nodes; ++q)
    for (std::size_t p = 0; p < q; ++p)
      if (edge(rng)) edges.push_back({static_cast<TaskId>(p), static_cast<TaskId>(q)});
  return TaskGraph::from_parts(std::move(tasks), std::move(edges), 0);
}

}  // namespace ampsched::oracle
