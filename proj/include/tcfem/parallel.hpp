#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace tcfem {

/// Worker count for patch loops: TCFEM_NUM_THREADS from the environment
/// (default 1) unless overridden with set_thread_count.
int thread_count();
void set_thread_count(int n);

/// Runs body(begin, end, worker) over a static partition of [0, n). The
/// partition only decides which thread computes which items, so results that
/// write disjoint outputs do not depend on the thread count.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(thread_count(), static_cast<int>(n))));
  if (workers <= 1) {
    body(std::size_t{0}, n, std::size_t{0});
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t b = std::min(n, w * chunk), e = std::min(n, (w + 1) * chunk);
    pool.emplace_back([&body, b, e, w] { body(b, e, w); });
  }
  body(std::size_t{0}, std::min(n, chunk), std::size_t{0});
}

}  // namespace tcfem
