#pragma once

// Deterministic fork-join helper: splits [0, n) into `workers` contiguous
// chunks, each processed by its own thread. Results must be written by index
// so the outcome is independent of scheduling.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace tepid {

inline void parallel_chunks(std::size_t n, int workers,
                            const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t n_threads =
      std::min<std::size_t>(std::max(workers, 1), n);
  if (n_threads <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(n_threads);
  const std::size_t chunk = (n + n_threads - 1) / n_threads;
  for (std::size_t t = 0; t < n_threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(begin + chunk, n);
    if (begin >= end) break;
    threads.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (std::thread& t : threads) t.join();
}

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace tepid
