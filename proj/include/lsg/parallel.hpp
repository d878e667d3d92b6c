#pragma once

#include <atomic>
#include <cstdlib>
#include <cstddef>
#include <thread>
#include <vector>

namespace lsg {

namespace detail {
inline int& worker_count_slot() {
  static int n = [] {
    if (const char* env = std::getenv("LSG_THREADS")) {
      int v = std::atoi(env);
      if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
  }();
  return n;
}
}  // namespace detail

inline int thread_count() { return detail::worker_count_slot(); }
inline void set_thread_count(int n) { detail::worker_count_slot() = n < 1 ? 1 : n; }

// Runs f(i) for every i in [0, n). Work is handed out in fixed-size chunks
// from an atomic cursor. Each index runs exactly once and callers may only
// write index-owned state, so results do not depend on the worker count or
// on scheduling order.
template <typename F>
void parallel_for(std::size_t n, F&& f, std::size_t grain = 64) {
  if (n == 0) return;
  const std::size_t chunks = (n + grain - 1) / grain;
  int workers = thread_count();
  if (workers > static_cast<int>(chunks)) workers = static_cast<int>(chunks);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> cursor{0};
  auto run = [&] {
    for (;;) {
      const std::size_t c = cursor.fetch_add(1, std::memory_order_relaxed);
      if (c >= chunks) return;
      const std::size_t lo = c * grain;
      const std::size_t hi = lo + grain < n ? lo + grain : n;
      for (std::size_t i = lo; i < hi; ++i) f(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers) - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
}

}  // namespace lsg
