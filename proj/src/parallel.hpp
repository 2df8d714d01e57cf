#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace lichmp::detail {

// Runs body(k) for k in [0, count); each index is handled by exactly one worker.
template <class Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), count);
  if (w <= 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (std::size_t t = 0; t < w; ++t) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) body(k);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace lichmp::detail
