#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace dismet {

/// Worker count: DISMETRICS_THREADS if set (clamped to [1, 256]), otherwise
/// the hardware concurrency.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n). Tasks must write only to their own output
/// slot; the caller reduces slots in index order afterwards, so the result
/// never depends on how work was interleaved.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = worker_count();
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (workers > n) workers = n;
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::mutex error_mu;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load()) std::rethrow_exception(error);
}

}  // namespace dismet
