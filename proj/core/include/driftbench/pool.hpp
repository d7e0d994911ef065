// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace driftbench {

/// Run fn(i) for i in [0, count) across a small worker pool.  Tasks own their
/// RNG state (derived from the index), write results into caller-owned slots
/// keyed by i, and never share mutable state, so the merged result does not
/// depend on scheduling order.
inline void parallel_for_indexed(std::size_t count, const std::function<void(std::size_t)>& fn,
                                 unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace driftbench
