#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace plcsynth {

// Runs fn(begin, end) over fixed chunks [k*chunk, (k+1)*chunk) of [0, n).
// Chunk boundaries do not depend on `threads`, so any per-chunk computation
// produces the same result for every worker count. The first exception thrown
// by a chunk is rethrown after all workers finish.
template <class Fn>
void parallel_chunks(std::size_t n, std::size_t chunk, std::size_t threads, Fn&& fn) {
  if (n == 0) return;
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  threads = std::clamp<std::size_t>(threads, 1, n_chunks);

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= n_chunks) return;
      try {
        fn(k * chunk, std::min(n, (k + 1) * chunk));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n_chunks);
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace plcsynth
