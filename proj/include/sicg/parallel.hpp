#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace sicg {

// Runs body(begin, end, worker) over contiguous chunks of [0, count). Callers
// merge per-worker results and sort, so output never depends on scheduling.
template <class Body>
void parallel_chunks(std::size_t count, int threads, Body body) {
  int workers = std::max(1, threads);
  if (workers == 1 || count < 2) {
    body(std::size_t{0}, count, 0);
    return;
  }
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), count));
  std::vector<std::thread> pool;
  std::size_t step = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    std::size_t b = w * step;
    std::size_t e = std::min(count, b + step);
    if (b >= e) break;
    pool.emplace_back([&body, b, e, w] { body(b, e, w); });
  }
  for (auto& t : pool) t.join();
}

int default_threads();
void set_default_threads(int threads);

}  // namespace sicg
