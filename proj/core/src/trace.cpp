#include "ampsched/trace.hpp"

#include <algorithm>
#include <array>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace ampsched {

using nlohmann::json;

std::vector<TraceEvent> Trace::worker_events(std::uint32_t worker) const {
  std::vector<TraceEvent> out;
  for (const auto& e : events)
    if (e.worker == worker) out.push_back(e);
  std::sort(out.begin(), out.end(), [](const TraceEvent& a, const TraceEvent& b) {
    return a.start_ns != b.start_ns ? a.start_ns < b.start_ns : a.end_ns < b.end_ns;
  });
  return out;
}

std::string trace_to_json(const Trace& trace) {
  json arr = json::array();
  for (const auto& e : trace.events) {
    arr.push_back({{"worker", e.worker},
                   {"task", e.task},
                   {"kind", std::string(1, kind_letter(e.kind))},
                   {"k", e.k},
                   {"i", e.i},
                   {"j", e.j},
                   {"start_ns", e.start_ns},
                   {"end_ns", e.end_ns}});
  }
  std::string out;
  for (std::size_t n = 0; n < arr.size(); ++n) {
    out += n == 0 ? "[\n  " : ",\n  ";
    out += arr[n].dump();
  }
  out += arr.empty() ? "[]\n" : "\n]\n";
  return out;
}

Trace trace_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + byte, '\n');
    throw std::invalid_argument("trace JSON: line " + std::to_string(line) + ": " + e.what());
  }
  if (!doc.is_array()) throw std::invalid_argument("trace JSON: line 1: expected an array of events");
  Trace trace;
  std::size_t index = 0;
  try {
    for (const json& je : doc) {
      TraceEvent e;
      e.worker = je.at("worker").get<std::uint32_t>();
      e.task = je.at("task").get<TaskId>();
      const auto kind = je.at("kind").get<std::string>();
      if (kind.size() != 1) throw std::invalid_argument("kind must be one letter");
      e.kind = kind_from_letter(kind[0]);
      e.k = je.at("k").get<std::uint32_t>();
      e.i = je.at("i").get<std::uint32_t>();
      e.j = je.at("j").get<std::uint32_t>();
      e.start_ns = je.at("start_ns").get<std::int64_t>();
      e.end_ns = je.at("end_ns").get<std::int64_t>();
      if (e.end_ns < e.start_ns) throw std::invalid_argument("end_ns precedes start_ns");
      trace.events.push_back(e);
      ++index;
    }
  } catch (const json::exception& e) {
    // The writer emits one event per line after the opening bracket.
    throw std::invalid_argument("trace JSON: line " + std::to_string(index + 2) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("trace JSON: line " + std::to_string(index + 2) + ": " + e.what());
  }
  if (!trace.events.empty()) {
    trace.wall_start_ns = 0;
    std::int64_t end = 0;
    std::uint32_t max_worker = 0;
    for (const auto& e : trace.events) {
      end = std::max(end, e.end_ns);
      max_worker = std::max(max_worker, e.worker);
    }
    trace.wall_end_ns = end;
    trace.workers = max_worker + 1;
  }
  return trace;
}

std::vector<WorkerUtilization> idle_stats(const Trace& trace, std::int64_t horizon_ns) {
  if (horizon_ns < trace.wall_end_ns)
    throw std::invalid_argument("idle_stats: horizon ends before the trace does");
  std::vector<std::int64_t> busy(trace.workers, 0);
  for (const auto& e : trace.events) {
    if (e.worker >= trace.workers) throw std::invalid_argument("idle_stats: worker id out of range");
    busy[e.worker] += e.duration_ns();
  }
  std::vector<WorkerUtilization> out;
  out.reserve(trace.workers);
  for (std::uint32_t w = 0; w < trace.workers; ++w) {
    WorkerUtilization u;
    u.worker = w;
    u.running = horizon_ns > 0 ? static_cast<double>(busy[w]) / static_cast<double>(horizon_ns) : 0.0;
    u.idle = 1.0 - u.running;
    out.push_back(u);
  }
  return out;
}

double mean_idle(const std::vector<WorkerUtilization>& stats) {
  if (stats.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : stats) sum += s.idle;
  return sum / static_cast<double>(stats.size());
}

std::vector<KindDuration> kind_durations(const Trace& trace) {
  struct Acc {
    std::size_t count = 0;
    double total = 0.0;
  };
  std::vector<std::array<Acc, kTaskKindCount>> acc(trace.workers);
  for (const auto& e : trace.events) {
    auto& a = acc.at(e.worker)[static_cast<std::size_t>(e.kind)];
    ++a.count;
    a.total += static_cast<double>(e.duration_ns());
  }
  std::vector<KindDuration> out;
  constexpr std::array kOrder{TaskKind::Potrf, TaskKind::Trsm, TaskKind::Syrk, TaskKind::Gemm};
  for (std::uint32_t w = 0; w < trace.workers; ++w)
    for (TaskKind kind : kOrder) {
      const auto& a = acc[w][static_cast<std::size_t>(kind)];
      if (a.count == 0) continue;
      out.push_back({w, kind, a.count, a.total / static_cast<double>(a.count)});
    }
  return out;
}

void write_idle_csv(std::ostream& out, const std::vector<WorkerUtilization>& stats) {
  const auto old = out.precision(6);
  out << "worker,running_pct,idle_pct\n";
  for (const auto& s : stats) out << s.worker << ',' << 100.0 * s.running << ',' << 100.0 * s.idle << '\n';
  out.precision(old);
}

void write_kind_csv(std::ostream& out, const std::vector<KindDuration>& rows) {
  const auto old = out.precision(8);
  out << "worker,kind,count,mean_ms\n";
  for (const auto& r : rows)
    out << r.worker << ',' << kind_letter(r.kind) << ',' << r.count << ',' << r.mean_ns / 1e6 << '\n';
  out.precision(old);
}

std::vector<std::string> validate_trace(const Trace& trace, const TaskGraph& g) {
  std::vector<std::string> problems;
  std::vector<int> seen(g.size(), 0);
  std::vector<const TraceEvent*> by_task(g.size(), nullptr);
  for (const auto& e : trace.events) {
    if (e.task >= g.size()) {
      problems.push_back("unknown task " + std::to_string(e.task));
      continue;
    }
    if (e.end_ns < e.start_ns) problems.push_back("task " + std::to_string(e.task) + " ends before it starts");
    ++seen[e.task];
    by_task[e.task] = &e;
  }
  for (std::size_t t = 0; t < g.size(); ++t)
    if (seen[t] != 1)
      problems.push_back("task " + std::to_string(t) + " executed " + std::to_string(seen[t]) + " times");

  for (std::uint32_t w = 0; w < trace.workers; ++w) {
    const auto evs = trace.worker_events(w);
    for (std::size_t n = 1; n < evs.size(); ++n)
      if (evs[n].start_ns < evs[n - 1].end_ns)
        problems.push_back("worker " + std::to_string(w) + " overlaps tasks " +
                           std::to_string(evs[n - 1].task) + " and " + std::to_string(evs[n].task));
  }

  for (const Edge& edge : g.edges()) {
    const TraceEvent* p = by_task[edge.pred];
    const TraceEvent* q = by_task[edge.succ];
    if (p && q && p->end_ns > q->start_ns)
      problems.push_back("edge " + std::to_string(edge.pred) + "->" + std::to_string(edge.succ) +
                         " violated");
  }
  return problems;
}

}  // namespace ampsched
