/**
 * parallel.hpp
 *
 * Minimal fork-join loop used to fan independent evolutions out over threads.
 */

#ifndef _catqaoa_parallel_hpp_
#define _catqaoa_parallel_hpp_

#include <atomic>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace catqaoa {

// Resolution order: explicit argument, CATQAOA_THREADS, hardware concurrency.
inline int resolve_thread_count(int requested = 0) {
  if (requested > 0) return requested;
  if (const char *env = std::getenv("CATQAOA_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? int(hw) : 1;
}

// Runs body(i) for i in [0, n) on up to n_threads workers.  Exceptions from
// workers are rethrown on the calling thread (first one wins).
inline void parallel_for(long n, const std::function<void(long)> &body,
                         int n_threads = 0) {
  n_threads = std::min<long>(resolve_thread_count(n_threads), n);
  if (n_threads <= 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      long i = next.fetch_add(1);
      if (i >= n) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto &th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace catqaoa

#endif
