#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace qfem {

// Process-wide worker cap, set once by the CLI from --threads.
int max_threads();
void set_max_threads(int n);

// Runs fn(i) for i in [0, n). Contiguous chunks, one thread per chunk.
// Workers only write to their own output slots, so results are identical
// for any thread count; any reduction happens afterwards in index order.
template <class Fn>
void parallel_for(std::size_t n, const Fn& fn, int threads = 0) {
  if (threads <= 0) threads = max_threads();
  std::size_t workers = static_cast<std::size_t>(threads);
  if (workers > n) workers = n;
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = lo + chunk < n ? lo + chunk : n;
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace qfem
