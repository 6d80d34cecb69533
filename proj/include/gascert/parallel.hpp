#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace gascert {

// 0 means hardware concurrency.
void set_thread_limit(int n);
int thread_limit();

// Runs body(i) for i in [0, n) over contiguous static chunks. Results must be
// written to per-index slots so the outcome does not depend on scheduling.
// The exception of the lowest failing chunk is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body&& body, std::size_t min_chunk = 256) {
  const std::size_t want = std::max<std::size_t>(1, n / std::max<std::size_t>(1, min_chunk));
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_limit()), want);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers, end = n * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace gascert
