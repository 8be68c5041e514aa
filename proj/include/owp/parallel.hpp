#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace owp {

// Runs fn(index) for index in [0, count). Cells must be independent; any
// randomness has to come from per-index substreams so the result does not
// depend on the worker count.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (std::size_t w = 0; w < nw; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += nw) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace owp
