#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tempoeval::detail {

inline unsigned effective_jobs(int jobs, std::size_t n) {
  unsigned hw = std::thread::hardware_concurrency();
  unsigned j = jobs > 0 ? static_cast<unsigned>(jobs) : (hw ? hw : 1);
  if (j > n) j = static_cast<unsigned>(n);
  return j ? j : 1;
}

// Runs fn(i) for every i in [0, n) on a bounded worker pool. Output must be
// written by index so the assembled result is order-deterministic. The first
// exception wins and is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  unsigned workers = effective_jobs(jobs, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace tempoeval::detail
