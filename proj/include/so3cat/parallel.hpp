#pragma once
// Tiny index-range parallel map.  Thread count: SO3CAT_THREADS env var if
// set, else hardware concurrency; jobs own disjoint state, results are
// merged by the caller in index order (deterministic output).

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace so3cat {

inline int thread_budget() {
  if (const char* env = std::getenv("SO3CAT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Run fn(i) for i in [0, n) on up to thread_budget() threads.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(n, thread_budget());
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace so3cat
