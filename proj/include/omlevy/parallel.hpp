#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace omlevy {

/// Runs body(i, worker) for i in [0, n) on `threads` workers pulling fixed-size chunks.
/// The first exception thrown by any worker is rethrown after all workers join.
template <class Body>
void parallel_for(long long n, int threads, Body&& body, long long chunk = 64) {
  threads = std::max(1, threads);
  if (threads == 1 || n <= chunk) {
    for (long long i = 0; i < n; ++i) body(i, 0);
    return;
  }
  std::atomic<long long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](int worker) {
    try {
      for (;;) {
        const long long begin = next.fetch_add(chunk);
        if (begin >= n) break;
        const long long end = std::min(n, begin + chunk);
        for (long long i = begin; i < end; ++i) body(i, worker);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(n);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < threads; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace omlevy
