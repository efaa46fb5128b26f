#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace sparsedom {

/// Static-partition parallel loop.  Each index writes only its own output
/// slot, so results are identical for any thread count.
template <typename Fn>
void parallel_for(std::int64_t begin, std::int64_t end, int threads, Fn&& fn) {
  const std::int64_t count = end - begin;
  if (count <= 0) return;
  int nt = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (nt < 1) nt = 1;
  if (nt == 1 || count < 2) {
    for (std::int64_t i = begin; i < end; ++i) fn(i);
    return;
  }
  if (nt > count) nt = static_cast<int>(count);
  std::vector<std::thread> pool;
  pool.reserve(nt);
  const std::int64_t chunk = (count + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    const std::int64_t lo = begin + t * chunk;
    const std::int64_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::int64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace sparsedom
