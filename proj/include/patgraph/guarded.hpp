#pragma once

#include <mutex>
#include <shared_mutex>
#include <utility>

namespace patgraph {

// Single-writer / multi-reader wrapper. Readers run concurrently; a writer
// runs alone, so a reader never observes a half-applied mutation.
template <typename T>
class Guarded {
 public:
  Guarded() = default;
  explicit Guarded(T value) : value_(std::move(value)) {}

  Guarded(const Guarded&) = delete;
  Guarded& operator=(const Guarded&) = delete;

  template <typename F>
  decltype(auto) read(F&& f) const {
    std::shared_lock lock(mutex_);
    return std::forward<F>(f)(std::as_const(value_));
  }

  template <typename F>
  decltype(auto) write(F&& f) {
    std::unique_lock lock(mutex_);
    return std::forward<F>(f)(value_);
  }

  // Replaces the guarded value wholesale (e.g. after loading a snapshot).
  void reset(T value) {
    std::unique_lock lock(mutex_);
    value_ = std::move(value);
  }

 private:
  mutable std::shared_mutex mutex_;
  T value_;
};

}  // namespace patgraph
