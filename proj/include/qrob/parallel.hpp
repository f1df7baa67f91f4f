#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qrob {

/// Error raised inside task `index` of a parallel loop.
class TaskError : public std::runtime_error {
 public:
  TaskError(std::size_t index, const std::string& what)
      : std::runtime_error("task " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Tasks must write
/// only to their own slot; callers reduce in index order afterwards, so the
/// result never depends on scheduling. When tasks throw, the failure with the
/// smallest index is rethrown as TaskError.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
  auto run_one = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) run_one(i);
      });
    }
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw TaskError(i, e.what());
    } catch (...) {
      throw TaskError(i, "unknown error");
    }
  }
}

}  // namespace qrob
