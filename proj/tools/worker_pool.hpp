#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace kxy::cli {

inline int default_jobs() {
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs task(i) for i in [0, count) on `jobs` threads. Results land at
/// index i, so the merged order never depends on scheduling. The first
/// exception (lowest index) is rethrown after all workers stop.
template <class Result>
std::vector<Result> parallel_map(std::size_t count, int jobs,
                                 const std::function<Result(std::size_t)>& task) {
  std::vector<Result> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count && !failed; i = next++) {
      try {
        results[i] = task(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  const int threads = static_cast<int>(std::min<std::size_t>(std::max(jobs, 1), count));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace kxy::cli
