#include <algorithm>
#include <queue>
#include <stdexcept>

#include "ampsched/sim.hpp"

namespace ampsched {
namespace {

void check_policy_fits(const Policy& policy, const MachineModel& machine) {
  const bool vc_policy = policy.kind == PolicyKind::Vc;
  const bool vc_view = machine.view == MachineView::Vc;
  if (vc_policy != vc_view)
    throw std::invalid_argument(std::string("policy ") + std::string(to_string(policy.kind)) +
                                " does not fit the " + std::string(to_string(machine.view)) + " view");
  validate_workers(policy, machine.workers());
}

void check_geometry(const TaskGraph& g, const CostModel& cost) {
  if (!cost.geometry()) return;
  const std::size_t s = cost.geometry()->block_count();
  for (const Task& t : g.tasks())
    if (t.k >= s || t.i >= s || t.j >= s)
      throw std::invalid_argument("task " + std::to_string(t.id) + " lies outside the cost model's tile grid");
}

/// Duration of every task on every resource, row-major by task.
std::vector<std::int64_t> duration_table(const TaskGraph& g, std::span<const SimResource> res,
                                         const CostModel& cost) {
  std::vector<std::int64_t> d(g.size() * res.size());
  for (const Task& t : g.tasks())
    for (std::size_t r = 0; r < res.size(); ++r) d[t.id * res.size() + r] = cost.duration_ns(t, res[r]);
  return d;
}

SimResource fastest_lane(std::span<const SimResource> res) {
  SimResource best = res.front();
  for (const auto& r : res)
    if (r.speed > best.speed) best = r;
  for (const auto& r : res)
    if (r.kind == Resource::FastLane && r.speed >= best.speed) return r;
  return best;
}

}  // namespace

SimResult simulate(const TaskGraph& g, const MachineModel& machine, const CostModel& cost,
                   const Policy& policy) {
  check_policy_fits(policy, machine);
  check_geometry(g, cost);
  const auto res = machine.resources();
  const auto workers = machine.workers();
  const std::size_t nr = res.size();
  const auto dur = duration_table(g, res, cost);

  std::vector<double> prio;
  if (policy.kind == PolicyKind::Cats) {
    const SimResource ref = fastest_lane(res);
    prio = bottom_levels(g, [&](const Task& t) { return static_cast<double>(cost.duration_ns(t, ref)); });
  }
  ReadyQueues queues(policy, prio);

  std::vector<std::size_t> indeg(g.size());
  for (TaskId t = 0; t < g.size(); ++t) {
    indeg[t] = g.indegree(t);
    if (indeg[t] == 0) queues.push(t, 0);
  }

  struct Running {
    TaskId task;
    std::int64_t start;
    bool critical;
  };
  std::vector<std::optional<Running>> busy(nr);
  // (finish time, resource)
  using Finish = std::pair<std::int64_t, std::size_t>;
  std::priority_queue<Finish, std::vector<Finish>, std::greater<Finish>> finishing;

  SimResult result;
  result.trace.workers = static_cast<std::uint32_t>(nr);
  std::int64_t now = 0;
  std::size_t done = 0;

  auto fast_idle = [&] {
    for (std::size_t r = 0; r < nr; ++r)
      if (!busy[r] && res[r].kind == Resource::FastLane) return true;
    return false;
  };

  while (done < g.size()) {
    // Ascending resource id; repeat while a pass still places work, since a
    // fast lane turning busy can open the bi-directional steal for slow lanes.
    for (bool placed = true; placed && !queues.empty();) {
      placed = false;
      for (std::size_t r = 0; r < nr && !queues.empty(); ++r) {
        if (busy[r]) continue;
        const auto d = queues.next(workers[r], fast_idle());
        if (!d) continue;
        busy[r] = Running{d->task, now, d->critical};
        finishing.push({now + dur[d->task * nr + r], r});
        placed = true;
      }
    }
    if (finishing.empty()) throw std::logic_error("simulate: no runnable task; graph is not a DAG");

    now = finishing.top().first;
    std::vector<std::size_t> finished;
    while (!finishing.empty() && finishing.top().first == now) {
      finished.push_back(finishing.top().second);
      finishing.pop();
    }
    std::sort(finished.begin(), finished.end());
    for (std::size_t r : finished) {
      const Running run = *busy[r];
      busy[r].reset();
      const Task& t = g.task(run.task);
      result.trace.events.push_back(
          {static_cast<std::uint32_t>(r), t.id, t.kind, t.k, t.i, t.j, run.start, now, run.critical});
      ++done;
      for (TaskId s : g.successors(t.id))
        if (--indeg[s] == 0) queues.push(s, static_cast<std::uint64_t>(now));
    }
  }

  std::sort(result.trace.events.begin(), result.trace.events.end(), [](const TraceEvent& a, const TraceEvent& b) {
    return std::tie(a.start_ns, a.worker) < std::tie(b.start_ns, b.worker);
  });
  result.makespan_ns = now;
  result.trace.wall_end_ns = now;
  result.utilization = idle_stats(result.trace, now);
  result.kind_means = kind_durations(result.trace);
  return result;
}

LowerBounds lower_bounds(const TaskGraph& g, const MachineModel& machine, const CostModel& cost) {
  check_geometry(g, cost);
  const auto res = machine.resources();
  const std::size_t nr = res.size();
  const auto dur = duration_table(g, res, cost);

  std::vector<std::int64_t> dmin(g.size());
  for (TaskId t = 0; t < g.size(); ++t)
    dmin[t] = *std::min_element(dur.begin() + t * nr, dur.begin() + (t + 1) * nr);

  LowerBounds lb;
  std::vector<std::int64_t> bl(g.size(), 0);
  for (TaskId t = static_cast<TaskId>(g.size()); t-- > 0;) {
    std::int64_t tail = 0;
    for (TaskId s : g.successors(t)) tail = std::max(tail, bl[s]);
    bl[t] = dmin[t] + tail;
    lb.cp_ns = std::max(lb.cp_ns, bl[t]);
  }

  // Resource r turns one unit of fastest-time work into at most
  // max_t dmin(t) / d(t, r) units per unit of wall time.
  double total = 0.0, rate = 0.0;
  for (TaskId t = 0; t < g.size(); ++t) total += static_cast<double>(dmin[t]);
  for (std::size_t r = 0; r < nr; ++r) {
    double best = 0.0;
    for (TaskId t = 0; t < g.size(); ++t)
      best = std::max(best, static_cast<double>(dmin[t]) / static_cast<double>(dur[t * nr + r]));
    rate += best;
  }
  lb.work_ns = g.size() == 0 ? 0.0 : total / rate;
  return lb;
}

}  // namespace ampsched
