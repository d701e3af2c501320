#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sle {

inline size_t resolve_threads(size_t requested) {
  if (requested > 0) return requested;
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? hc : 4;
}

// Runs fn(i) for i in [0, n). Work items are claimed from an atomic counter;
// results must be written into per-index slots so output does not depend on
// scheduling. First exception wins and is rethrown on the caller.
inline void parallel_for(size_t n, size_t n_threads, const std::function<void(size_t)>& fn) {
  n_threads = resolve_threads(n_threads);
  if (n == 0) return;
  if (n_threads <= 1 || n == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr eptr = nullptr;
  std::mutex eptr_mutex;
  auto worker = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(eptr_mutex);
        if (!eptr) eptr = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  size_t spawn = std::min(n_threads, n);
  pool.reserve(spawn);
  for (size_t t = 0; t < spawn; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (eptr) std::rethrow_exception(eptr);
}

}  // namespace sle
