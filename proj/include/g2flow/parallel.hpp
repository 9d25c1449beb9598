#pragma once
// Minimal static-partition parallel loop. Each index is visited by exactly
// one worker, so callers writing to disjoint per-index slots need no locks.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace g2flow {

inline std::atomic<int>& thread_setting() {
  static std::atomic<int> n{1};
  return n;
}

// 0 means hardware concurrency.
inline void set_thread_count(int n) {
  if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  thread_setting().store(n);
}
inline int thread_count() { return thread_setting().load(); }

template <class F>
void parallel_for(std::size_t n, F&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, thread_count()));
  if (workers == 1 || n < 2 * workers) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, w, &fn, &errors] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  // lowest chunk first, so the reported failure does not depend on timing
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace g2flow
