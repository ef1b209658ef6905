#pragma once

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace sievelab {

// Runs body(i) for i in [0, n) over a worker pool. Replicate seeds are
// assigned by index before scheduling, so results are identical for any
// worker count; callers store into index-addressed slots.
template <class Body>
void parallel_for_index(int n, int workers, Body&& body) {
  if (n <= 0) return;
  if (workers <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::atomic<int> error_guard{0};
  auto run = [&] {
    for (;;) {
      int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n || failed.load(std::memory_order_relaxed)) break;
      try {
        body(i);
      } catch (...) {
        if (error_guard.fetch_add(1) == 0) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        break;
      }
    }
  };
  int count = std::min(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(count);
  for (int t = 0; t < count; ++t) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace sievelab
