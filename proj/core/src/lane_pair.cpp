#include "ampsched/blis.hpp"

namespace ampsched {

LanePair::LanePair(std::function<void()> on_start)
    : helper_([this, hook = std::move(on_start)]() mutable { loop(std::move(hook)); }) {}

LanePair::~LanePair() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  helper_.join();
}

void LanePair::loop(std::function<void()> on_start) {
  if (on_start) on_start();
  std::unique_lock lock(mu_);
  for (;;) {
    cv_.wait(lock, [&] { return stop_ || job_ != nullptr; });
    if (stop_) return;
    const std::function<void()>* job = job_;
    lock.unlock();
    std::exception_ptr err;
    try {
      (*job)();
    } catch (...) {
      err = std::current_exception();
    }
    lock.lock();
    job_ = nullptr;
    error_ = err;
    done_ = true;
    cv_.notify_all();
  }
}

void LanePair::run(const std::function<void()>& fast, const std::function<void()>& slow) {
  {
    std::lock_guard lock(mu_);
    job_ = &slow;
    done_ = false;
    error_ = nullptr;
  }
  cv_.notify_all();

  std::exception_ptr fast_error;
  try {
    fast();
  } catch (...) {
    fast_error = std::current_exception();
  }

  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return done_; });
  std::exception_ptr slow_error = error_;
  lock.unlock();
  if (fast_error) std::rethrow_exception(fast_error);
  if (slow_error) std::rethrow_exception(slow_error);
}

}  // namespace ampsched
