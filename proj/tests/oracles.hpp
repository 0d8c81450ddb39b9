#pragma once

// Independent reference implementations used only by the tests.

#include <cstdint>
#include <random>
#include <vector>

#include "ampsched/task_graph.hpp"

namespace ampsched::oracle {

struct LoopTask {
  TaskKind kind;
  std::uint32_t k, i, j;
  std::vector<BlockCoord> reads;
  BlockCoord write;
};

/// Direct enumeration of the right-looking upper loop nest with the block
/// sets each kernel touches.
std::vector<LoopTask> enumerate_loop_nest(std::size_t s);

/// Dependences by comparing every ordered pair of tasks: RAW and WAW against
/// the closest earlier writer, WAR against readers since that writer.
std::vector<Edge> pairwise_dependences(const std::vector<LoopTask>& tasks);

/// Longest weighted path by exhaustive path enumeration. Small graphs only.
double longest_path_exhaustive(const TaskGraph& g, const std::vector<double>& cost);

/// Random forward-edge DAG with `nodes` tasks placed on an s x s tile grid.
TaskGraph random_dag(std::mt19937_64& rng, std::size_t nodes, std::size_t s, double edge_prob);

}  // namespace ampsched::oracle
