// Minimal deterministic fork-join helper.
//
// Work items are identified by index; each worker owns a static, contiguous
// slice of the index range, and results must be written to index-addressed
// storage.  Combined with counter-based randomness this makes every
// computation independent of the thread count and of scheduling order.
#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace latspec {

// Resolves an effective worker count: an explicit request wins, then the
// LATTICE_SPECTRA_THREADS environment variable, then hardware concurrency.
inline int resolve_thread_count(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LATTICE_SPECTRA_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<int>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs body(i) for i in [0, count).  The first exception thrown by any worker
// is rethrown on the calling thread after all workers have joined.
inline void parallel_for_index(long long count, int threads,
                               const std::function<void(long long)>& body) {
  threads = std::max(1, threads);
  if (count <= 0) return;
  if (threads == 1 || count == 1) {
    for (long long i = 0; i < count; ++i) body(i);
    return;
  }
  threads = static_cast<int>(std::min<long long>(threads, count));
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const long long chunk = (count + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const long long begin = t * chunk;
    const long long end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        for (long long i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace latspec
