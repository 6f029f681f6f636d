#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace bkmodes {

// Default worker count for internal kernels: BKMODES_THREADS when set to a
// positive integer, otherwise 1.
inline int default_thread_count() {
  if (const char* env = std::getenv("BKMODES_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

inline int resolve_threads(int requested) {
  return requested >= 1 ? requested : default_thread_count();
}

// Runs fn(worker, begin, end) over near-equal chunks of [0, count). Callers
// only combine chunk results with order-independent reductions (integer sums,
// (value, index) argmax with lowest-index tie-break), so the worker count
// never changes results.
template <typename Fn>
void parallel_chunks(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(threads < 1 ? 1 : threads, count);
  if (workers <= 1) {
    if (count > 0) fn(0, std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, w, begin, end] {
      fn(static_cast<int>(w), begin, end);
    });
  }
  fn(0, std::size_t{0}, std::min(count, chunk));
  for (std::thread& t : pool) t.join();
}

}  // namespace bkmodes
