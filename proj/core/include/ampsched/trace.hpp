#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ampsched/task_graph.hpp"

namespace ampsched {

struct TraceEvent {
  std::uint32_t worker = 0;
  TaskId task = 0;
  TaskKind kind = TaskKind::Potrf;
  std::uint32_t k = 0;
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  std::int64_t start_ns = 0;
  std::int64_t end_ns = 0;
  /// Dispatched from the CATS critical queue. Not serialized.
  bool from_critical = false;

  std::int64_t duration_ns() const { return end_ns - start_ns; }
};

/// Per-worker execution record. Times are nanoseconds relative to the start
/// of the run.
struct Trace {
  std::vector<TraceEvent> events;
  std::int64_t wall_start_ns = 0;
  std::int64_t wall_end_ns = 0;
  std::uint32_t workers = 0;

  std::int64_t span_ns() const { return wall_end_ns - wall_start_ns; }
  /// Events of one worker in start order.
  std::vector<TraceEvent> worker_events(std::uint32_t worker) const;
};

/// JSON array of {worker, task, kind, k, i, j, start_ns, end_ns}.
std::string trace_to_json(const Trace& trace);
/// Worker count is taken as the largest worker id + 1. Throws
/// std::invalid_argument with a line number on malformed input.
Trace trace_from_json(std::string_view text);

struct WorkerUtilization {
  std::uint32_t worker = 0;
  double running = 0.0;  // fraction of the horizon
  double idle = 1.0;
};

/// running = sum of event durations / horizon, idle = 1 - running.
std::vector<WorkerUtilization> idle_stats(const Trace& trace, std::int64_t horizon_ns);
double mean_idle(const std::vector<WorkerUtilization>& stats);

struct KindDuration {
  std::uint32_t worker = 0;
  TaskKind kind = TaskKind::Potrf;
  std::size_t count = 0;
  double mean_ns = 0.0;
};

/// Mean task duration per (worker, kind), workers ascending, kinds in C/T/S/G order.
std::vector<KindDuration> kind_durations(const Trace& trace);

/// Header: worker,running_pct,idle_pct
void write_idle_csv(std::ostream& out, const std::vector<WorkerUtilization>& stats);
/// Header: worker,kind,count,mean_ms
void write_kind_csv(std::ostream& out, const std::vector<KindDuration>& rows);

/// Checks per-worker ordering, exactly-once execution and end(pred) <= start(succ)
/// for every edge. Returns human-readable violations, empty when legal.
std::vector<std::string> validate_trace(const Trace& trace, const TaskGraph& g);

}  // namespace ampsched
