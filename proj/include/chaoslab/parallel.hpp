#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace chaoslab {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(chunk) for chunk in [0, n_chunks). Work items are independent and
// write into caller-owned per-chunk slots; the caller combines slots in chunk
// order, so results do not depend on the worker count.
inline void for_each_chunk(std::uint64_t n_chunks, int threads,
                           const std::function<void(std::uint64_t)>& fn) {
  int workers = resolve_threads(threads);
  if (workers <= 1 || n_chunks <= 1) {
    for (std::uint64_t c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  if (static_cast<std::uint64_t>(workers) > n_chunks)
    workers = static_cast<int>(n_chunks);

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      std::uint64_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      try {
        fn(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace chaoslab
