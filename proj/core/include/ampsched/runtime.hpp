#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ampsched/blis.hpp"
#include "ampsched/dense.hpp"
#include "ampsched/scheduling.hpp"
#include "ampsched/task_graph.hpp"
#include "ampsched/trace.hpp"

namespace ampsched {

struct RunOptions {
  /// Cache strides of both lane kinds and the split used by vc-pair workers.
  LaneConfig lanes;
  /// Test hook: each task body sleeps a random 0..jitter_max_us microseconds.
  std::uint32_t jitter_max_us = 0;
  std::uint64_t jitter_seed = 0;
  /// Advisory pinning hook, called on every worker thread before it starts.
  std::function<void(const WorkerDescriptor&)> pin;
};

/// Raised by run() when a diagonal block is not positive definite. Carries
/// the global pivot index and the trace of everything that ran.
class FactorizationAborted : public NotPositiveDefinite {
 public:
  FactorizationAborted(std::size_t index, Trace partial)
      : NotPositiveDefinite(index), partial_(std::move(partial)) {}
  const Trace& partial_trace() const { return partial_; }

 private:
  Trace partial_;
};

/// Executes the Cholesky DAG on worker threads. On return `m` holds U (its
/// strictly lower part zeroed) and the trace of the run.
Trace run(const TaskGraph& g, BlockedMatrix& m, const Policy& policy,
          std::span<const WorkerDescriptor> workers, const RunOptions& options = {});

/// Default worker set for `count` workers: all fast lanes for OBLIVIOUS, the
/// first ceil(count/2) fast and the rest slow for CATS, vc-pairs for VC.
std::vector<WorkerDescriptor> make_workers(const Policy& policy, std::size_t count);

/// Cholesky rate: (n^3 / 3) / seconds / 1e9.
double gflops(double n, double seconds);

}  // namespace ampsched
