#include "ampsched/scheduling.hpp"

#include <algorithm>
#include <stdexcept>

namespace ampsched {

void Policy::validate() const {
  if (kind == PolicyKind::Cats && !(cats_threshold >= 0.0 && cats_threshold <= 1.0))
    throw std::invalid_argument("CATS threshold must lie in [0, 1]");
}

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Oblivious: return "oblivious";
    case PolicyKind::Cats: return "cats";
    case PolicyKind::Vc: return "vc";
  }
  return "?";
}

std::string_view to_string(Stealing stealing) {
  switch (stealing) {
    case Stealing::None: return "none";
    case Stealing::Uni: return "uni";
    case Stealing::Bi: return "bi";
  }
  return "?";
}

std::string_view to_string(Resource r) {
  switch (r) {
    case Resource::FastLane: return "fast";
    case Resource::SlowLane: return "slow";
    case Resource::VcPair: return "vc";
  }
  return "?";
}

PolicyKind parse_policy_kind(std::string_view text) {
  if (text == "oblivious") return PolicyKind::Oblivious;
  if (text == "cats") return PolicyKind::Cats;
  if (text == "vc") return PolicyKind::Vc;
  throw std::invalid_argument("unknown policy '" + std::string(text) + "'");
}

Stealing parse_stealing(std::string_view text) {
  if (text == "none") return Stealing::None;
  if (text == "uni") return Stealing::Uni;
  if (text == "bi") return Stealing::Bi;
  throw std::invalid_argument("unknown stealing mode '" + std::string(text) + "'");
}

void validate_workers(const Policy& policy, std::span<const WorkerDescriptor> workers) {
  policy.validate();
  if (workers.empty()) throw std::invalid_argument("at least one worker is required");
  const bool all_vc = std::all_of(workers.begin(), workers.end(),
                                  [](const auto& w) { return w.resource == Resource::VcPair; });
  const bool no_vc = std::none_of(workers.begin(), workers.end(),
                                  [](const auto& w) { return w.resource == Resource::VcPair; });
  if (policy.kind == PolicyKind::Vc && !all_vc)
    throw std::invalid_argument("VC policy requires vc-pair workers only");
  if (policy.kind != PolicyKind::Vc && !no_vc)
    throw std::invalid_argument("lane policies cannot use vc-pair workers");
  if (policy.kind == PolicyKind::Cats) {
    auto has = [&](Resource r) {
      return std::any_of(workers.begin(), workers.end(), [r](const auto& w) { return w.resource == r; });
    };
    // Otherwise one of the two queues has no eligible consumer.
    if (policy.stealing != Stealing::Bi && !has(Resource::FastLane))
      throw std::invalid_argument("CATS without bi-directional stealing needs a fast lane");
    if (policy.stealing == Stealing::None && !has(Resource::SlowLane))
      throw std::invalid_argument("CATS without stealing needs a slow lane");
  }
}

ReadyQueues::ReadyQueues(Policy policy, std::span<const double> priorities)
    : policy_(policy), prio_(priorities) {
  policy_.validate();
}

void ReadyQueues::push(TaskId task, std::uint64_t stamp) {
  if (policy_.kind != PolicyKind::Cats) {
    fifo_.push({stamp, task});
    return;
  }
  const double bl = prio_[task];
  double max_ready = bl;
  if (!critical_.empty()) max_ready = std::max(max_ready, -critical_.top().first);
  if (!noncritical_.empty()) max_ready = std::max(max_ready, -noncritical_.top().first);
  if (bl >= policy_.cats_threshold * max_ready)
    critical_.push({-bl, task});
  else
    noncritical_.push({-bl, task});
}

std::optional<Dispatch> ReadyQueues::pop(MinHeap<PrioKey>& q, bool critical) {
  if (q.empty()) return std::nullopt;
  const TaskId t = q.top().second;
  q.pop();
  return Dispatch{t, critical};
}

std::optional<Dispatch> ReadyQueues::ready_queue_next(const WorkerDescriptor& worker) {
  if (policy_.kind != PolicyKind::Cats) {
    if (fifo_.empty()) return std::nullopt;
    const TaskId t = fifo_.top().second;
    fifo_.pop();
    return Dispatch{t, false};
  }
  if (worker.resource == Resource::FastLane) return pop(critical_, true);
  return pop(noncritical_, false);
}

std::optional<Dispatch> ReadyQueues::steal(const WorkerDescriptor& worker, bool any_fast_idle) {
  if (policy_.kind != PolicyKind::Cats || policy_.stealing == Stealing::None) return std::nullopt;
  if (worker.resource == Resource::FastLane) return pop(noncritical_, false);
  if (policy_.stealing == Stealing::Bi && !any_fast_idle) return pop(critical_, true);
  return std::nullopt;
}

std::optional<Dispatch> ReadyQueues::next(const WorkerDescriptor& worker, bool any_fast_idle) {
  if (auto d = ready_queue_next(worker)) return d;
  return steal(worker, any_fast_idle);
}

}  // namespace ampsched
