#include "ampsched/runtime.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>

namespace ampsched {
namespace {

using Clock = std::chrono::steady_clock;

void execute(const Task& t, BlockedMatrix& m, const WorkerDescriptor& w, LanePair* lanes,
             const LaneConfig& cfg) {
  const CacheParams& lane = w.resource == Resource::SlowLane ? cfg.slow : cfg.fast;
  const bool vc = w.resource == Resource::VcPair;
  switch (t.kind) {
    case TaskKind::Potrf:
      try {
        potrf_in_place(m.block(t.k, t.k));
      } catch (const NotPositiveDefinite& e) {
        throw NotPositiveDefinite(t.k * m.block_size() + e.index());
      }
      break;
    case TaskKind::Trsm:
      if (vc)
        trsm_asym(m.block(t.k, t.k), m.block(t.k, t.j), cfg, *lanes);
      else
        trsm_blocked(m.block(t.k, t.k), m.block(t.k, t.j), lane);
      break;
    case TaskKind::Syrk:
      if (vc)
        syrk_asym(m.block(t.k, t.i), m.block(t.i, t.i), cfg, *lanes);
      else
        syrk_blocked(m.block(t.k, t.i), m.block(t.i, t.i), lane);
      break;
    case TaskKind::Gemm:
      if (vc)
        gemm_asym(m.block(t.k, t.i), m.block(t.k, t.j), m.block(t.i, t.j), cfg, *lanes);
      else
        gemm_blocked(m.block(t.k, t.i), m.block(t.k, t.j), m.block(t.i, t.j), lane);
      break;
  }
}

class Executor {
 public:
  Executor(const TaskGraph& g, BlockedMatrix& m, const Policy& policy,
           std::span<const WorkerDescriptor> workers, const RunOptions& options)
      : g_(g),
        m_(m),
        workers_(workers),
        options_(options),
        priorities_(policy.kind == PolicyKind::Cats
                        ? bottom_levels(g, [geom = TileGeometry{m.order(), m.block_size()}](
                                               const Task& t) { return task_flops(t, geom); })
                        : std::vector<double>(g.size(), 0.0)),
        queues_(policy, priorities_),
        indegree_(g.size()),
        idle_(workers.size(), true),
        events_(workers.size()) {
    for (const auto& w : workers_)
      if (w.resource == Resource::FastLane) ++fast_idle_;
    for (TaskId t = 0; t < g.size(); ++t) {
      indegree_[t].store(static_cast<std::uint32_t>(g.indegree(t)), std::memory_order_relaxed);
      if (g.indegree(t) == 0) queues_.push(t, stamp_++);
    }
  }

  Trace execute_all() {
    start_ = Clock::now();
    {
      std::vector<std::jthread> threads;
      threads.reserve(workers_.size());
      for (std::size_t w = 0; w < workers_.size(); ++w) threads.emplace_back([this, w] { worker_loop(w); });
    }
    Trace trace;
    trace.workers = static_cast<std::uint32_t>(workers_.size());
    for (auto& per_worker : events_)
      trace.events.insert(trace.events.end(), per_worker.begin(), per_worker.end());
    std::sort(trace.events.begin(), trace.events.end(), [](const TraceEvent& a, const TraceEvent& b) {
      return std::tie(a.start_ns, a.worker) < std::tie(b.start_ns, b.worker);
    });
    for (const auto& e : trace.events) trace.wall_end_ns = std::max(trace.wall_end_ns, e.end_ns);

    if (error_) std::rethrow_exception(error_);
    if (pivot_) throw FactorizationAborted(*pivot_, std::move(trace));
    if (completed_ != g_.size()) throw std::logic_error("run: scheduler stopped before all tasks ran");
    return trace;
  }

 private:
  std::int64_t now_ns() const {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start_).count();
  }

  void set_idle(std::size_t w, bool idle) {
    if (idle_[w] == idle) return;
    idle_[w] = idle;
    if (workers_[w].resource == Resource::FastLane) fast_idle_ += idle ? 1 : -1;
  }

  void worker_loop(std::size_t w) {
    const WorkerDescriptor& desc = workers_[w];
    if (options_.pin) options_.pin(desc);
    std::unique_ptr<LanePair> lanes;
    if (desc.resource == Resource::VcPair) lanes = std::make_unique<LanePair>();
    std::mt19937_64 jitter(options_.jitter_seed ^ (0x9e3779b97f4a7c15ULL * (w + 1)));
    std::vector<TaskId> released;

    std::unique_lock lock(mu_);
    for (;;) {
      if (stop_ || completed_ == g_.size()) break;
      const auto d = queues_.next(desc, fast_idle_ > 0);
      if (!d) {
        set_idle(w, true);
        cv_.wait(lock);
        continue;
      }
      set_idle(w, false);
      // A fast lane going busy can unblock slow lanes waiting to steal.
      if (desc.resource == Resource::FastLane && !queues_.empty()) cv_.notify_all();
      lock.unlock();

      const Task& task = g_.task(d->task);
      TraceEvent ev{static_cast<std::uint32_t>(w), task.id, task.kind, task.k, task.i, task.j,
                    now_ns(), 0, d->critical};
      std::exception_ptr failure;
      std::optional<std::size_t> pivot;
      try {
        if (options_.jitter_max_us > 0)
          std::this_thread::sleep_for(std::chrono::microseconds(jitter() % (options_.jitter_max_us + 1)));
        execute(task, m_, desc, lanes.get(), options_.lanes);
      } catch (const NotPositiveDefinite& e) {
        pivot = e.index();
      } catch (...) {
        failure = std::current_exception();
      }
      ev.end_ns = now_ns();
      events_[w].push_back(ev);

      released.clear();
      if (!pivot && !failure)
        for (TaskId s : g_.successors(task.id))
          if (indegree_[s].fetch_sub(1, std::memory_order_acq_rel) == 1) released.push_back(s);

      lock.lock();
      if (pivot || failure) {
        if (pivot && !pivot_) pivot_ = pivot;
        if (failure && !error_) error_ = failure;
        stop_ = true;
        cv_.notify_all();
        break;
      }
      ++completed_;
      for (TaskId s : released) queues_.push(s, stamp_++);
      if (!released.empty() || completed_ == g_.size()) cv_.notify_all();
    }
  }

  const TaskGraph& g_;
  BlockedMatrix& m_;
  std::span<const WorkerDescriptor> workers_;
  const RunOptions& options_;
  std::vector<double> priorities_;

  std::mutex mu_;
  std::condition_variable cv_;
  ReadyQueues queues_;
  std::vector<std::atomic<std::uint32_t>> indegree_;
  std::vector<bool> idle_;
  int fast_idle_ = 0;
  std::uint64_t stamp_ = 0;
  std::size_t completed_ = 0;
  bool stop_ = false;
  std::optional<std::size_t> pivot_;
  std::exception_ptr error_;

  Clock::time_point start_;
  std::vector<std::vector<TraceEvent>> events_;
};

void check_graph_matches(const TaskGraph& g, const BlockedMatrix& m) {
  const std::size_t s = m.block_count();
  if (g.block_count() != s)
    throw std::invalid_argument("run: graph was built for " + std::to_string(g.block_count()) +
                                " block rows, matrix has " + std::to_string(s));
  for (const Task& t : g.tasks())
    if (t.k >= s || t.i >= s || t.j >= s) throw std::invalid_argument("run: task indexes outside the tile grid");
}

}  // namespace

Trace run(const TaskGraph& g, BlockedMatrix& m, const Policy& policy,
          std::span<const WorkerDescriptor> workers, const RunOptions& options) {
  validate_workers(policy, workers);
  options.lanes.validate();
  check_graph_matches(g, m);

  Executor exec(g, m, policy, workers, options);
  Trace trace = exec.execute_all();

  const std::size_t s = m.block_count();
  for (std::size_t j = 0; j < s; ++j)
    for (std::size_t i = j + 1; i < s; ++i) {
      MatrixView blk = m.block(i, j);
      for (std::size_t c = 0; c < blk.cols; ++c)
        for (std::size_t r = 0; r < blk.rows; ++r) blk(r, c) = 0.0;
    }
  return trace;
}

std::vector<WorkerDescriptor> make_workers(const Policy& policy, std::size_t count) {
  std::vector<WorkerDescriptor> out;
  const std::size_t fast = (count + 1) / 2;
  for (std::size_t w = 0; w < count; ++w) {
    Resource r = Resource::FastLane;
    if (policy.kind == PolicyKind::Vc)
      r = Resource::VcPair;
    else if (policy.kind == PolicyKind::Cats && w >= fast)
      r = Resource::SlowLane;
    out.push_back({static_cast<std::uint32_t>(w), r, std::nullopt});
  }
  return out;
}

double gflops(double n, double seconds) {
  if (!(seconds > 0.0)) throw std::invalid_argument("gflops: seconds must be > 0");
  return n * n * n / 3.0 / seconds / 1e9;
}

}  // namespace ampsched
