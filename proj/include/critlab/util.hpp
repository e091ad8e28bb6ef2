#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace critlab {

/// Runs fn(i) for i in [begin, end) on `threads` workers.  Work is split by
/// index so results routed by index are independent of scheduling.
inline void parallel_for(std::size_t begin, std::size_t end,
                         const std::function<void(std::size_t)>& fn,
                         unsigned threads = 0) {
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads <= 1 || end - begin <= 1) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::size_t count = end - begin;
  std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    std::size_t lo = begin + t * chunk;
    std::size_t hi = lo + chunk < end ? lo + chunk : end;
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace critlab
