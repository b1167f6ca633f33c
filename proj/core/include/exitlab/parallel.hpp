#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace exitlab {

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency() threads.
/// fn must write only to slots it owns (typically index i of a preallocated
/// buffer); with per-index RNG streams this makes results independent of the
/// thread count and of scheduling, so reductions done afterwards in index
/// order are bit-reproducible.  The first exception thrown by any fn(i) is
/// rethrown on the calling thread after the pool drains.
template <typename Fn>
void parallel_for(std::int64_t n, Fn&& fn, unsigned max_threads = 0) {
  if (n <= 0) return;
  unsigned hw = max_threads ? max_threads : std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (hw == 1 || n < 256) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  const std::int64_t chunk = std::max<std::int64_t>(1, n / (static_cast<std::int64_t>(hw) * 16));
  auto worker = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::int64_t begin = next.fetch_add(chunk);
      if (begin >= n) return;
      const std::int64_t end = std::min(n, begin + chunk);
      try {
        for (std::int64_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(hw - 1);
  for (unsigned t = 0; t + 1 < hw; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failed.load()) std::rethrow_exception(error);
}

}  // namespace exitlab
