#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace heavyls {

/// Worker cap: HEAVYLS_THREADS when set, hardware concurrency otherwise.
inline int worker_count() {
  if (const char* env = std::getenv("HEAVYLS_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

/// Runs fn(0..ntasks-1) across workers. Tasks must write to disjoint slots;
/// results are then independent of the thread count and schedule.
inline void parallel_for(int ntasks, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_count(), ntasks);
  if (workers <= 1) {
    for (int i = 0; i < ntasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int wid = 0; wid < workers; ++wid) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= ntasks || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace heavyls
