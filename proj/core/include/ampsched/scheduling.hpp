#pragma once

// Scheduling policies shared by the threaded runtime and the simulator.
//
//   OBLIVIOUS  one FIFO queue ordered by (enable stamp, task id); every worker
//              is treated alike.
//   CATS       bottom-level driven critical / non-critical queues. A task is
//              critical when, at the moment it becomes ready, its bottom
//              level is >= threshold * max bottom level among ready tasks.
//              Critical tasks are served by fast lanes only; stealing lets
//              fast lanes take non-critical work (uni) and, additionally,
//              slow lanes take critical work while no fast lane is idle (bi).
//   VC         the OBLIVIOUS FIFO over virtual-core workers.

#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "ampsched/task_graph.hpp"

namespace ampsched {

enum class PolicyKind { Oblivious, Cats, Vc };
enum class Stealing { None, Uni, Bi };

struct Policy {
  PolicyKind kind = PolicyKind::Oblivious;
  double cats_threshold = 0.9;
  Stealing stealing = Stealing::Bi;

  static Policy oblivious() { return {PolicyKind::Oblivious}; }
  static Policy cats(double threshold = 0.9, Stealing stealing = Stealing::Bi) {
    return {PolicyKind::Cats, threshold, stealing};
  }
  static Policy vc() { return {PolicyKind::Vc}; }

  void validate() const;
};

std::string_view to_string(PolicyKind kind);
std::string_view to_string(Stealing stealing);
PolicyKind parse_policy_kind(std::string_view text);
Stealing parse_stealing(std::string_view text);

enum class Resource { FastLane, SlowLane, VcPair };

std::string_view to_string(Resource r);

struct WorkerDescriptor {
  std::uint32_t id = 0;
  Resource resource = Resource::FastLane;
  /// Advisory CPU hint handed to the pinning hook; ignored by default.
  std::optional<int> pin_hint;
};

/// VC needs vc-pair workers only; OBLIVIOUS and CATS need lanes only. CATS
/// needs a fast lane unless stealing is bi, and a slow lane when stealing is none.
void validate_workers(const Policy& policy, std::span<const WorkerDescriptor> workers);

struct Dispatch {
  TaskId task = 0;
  bool critical = false;
};

/// Ready-task bookkeeping for one run. Not thread-safe; the runtime guards it
/// with its own mutex.
class ReadyQueues {
 public:
  /// `priorities` (bottom levels) must outlive the queues; only CATS reads them.
  ReadyQueues(Policy policy, std::span<const double> priorities);

  /// Makes `task` ready. `stamp` orders the FIFO (enable time or a counter).
  void push(TaskId task, std::uint64_t stamp);

  /// The worker's own queue: FIFO head, or for CATS the critical queue (fast
  /// lanes) / non-critical queue (slow lanes).
  std::optional<Dispatch> ready_queue_next(const WorkerDescriptor& worker);
  /// CATS only; see the header comment for the direction rules.
  std::optional<Dispatch> steal(const WorkerDescriptor& worker, bool any_fast_idle);
  /// ready_queue_next, then steal.
  std::optional<Dispatch> next(const WorkerDescriptor& worker, bool any_fast_idle);

  bool empty() const { return size() == 0; }
  std::size_t size() const { return fifo_.size() + critical_.size() + noncritical_.size(); }
  std::size_t critical_size() const { return critical_.size(); }
  std::size_t noncritical_size() const { return noncritical_.size(); }

 private:
  using FifoKey = std::pair<std::uint64_t, TaskId>;
  // (-bottom level, id): smallest first means highest priority first.
  using PrioKey = std::pair<double, TaskId>;
  template <typename K>
  using MinHeap = std::priority_queue<K, std::vector<K>, std::greater<K>>;

  static std::optional<Dispatch> pop(MinHeap<PrioKey>& q, bool critical);

  Policy policy_;
  std::span<const double> prio_;
  MinHeap<FifoKey> fifo_;
  MinHeap<PrioKey> critical_;
  MinHeap<PrioKey> noncritical_;
};

}  // namespace ampsched
