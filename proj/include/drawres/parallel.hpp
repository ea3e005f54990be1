#ifndef DRAWRES_PARALLEL_HPP
#define DRAWRES_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace drawres {

/// Process-wide cap on worker threads (>= 1). Defaults to 1.
void set_max_threads(unsigned n);
unsigned max_threads();

/// Calls f(i) for i in [0, n). Work is split in contiguous chunks; callers write
/// results into per-index slots so the outcome never depends on scheduling.
template <typename F>
void parallel_for(std::size_t n, F &&f) {
  const std::size_t workers = std::min<std::size_t>(max_threads(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      f(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i)
          f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error)
          first_error = std::current_exception();
      }
    });
  }
  for (auto &t : pool)
    t.join();
  if (first_error)
    std::rethrow_exception(first_error);
}

} // namespace drawres

#endif // DRAWRES_PARALLEL_HPP
