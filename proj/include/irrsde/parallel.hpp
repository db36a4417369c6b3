#pragma once

// Data-parallel execution over independent work items with reductions whose
// result never depends on the worker count: workers only fill per-item slots,
// and every reduction runs afterwards over the item-ordered array with a
// fixed pairwise tree.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace irrsde {

/// Environment override for the worker count. Never changes results.
inline constexpr const char* kThreadsEnv = "IRRSDE_THREADS";

/// Resolves a requested worker count; 0 means "IRRSDE_THREADS, else hardware".
inline std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv(kThreadsEnv)) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Calls body(begin, end) over [0, count) in chunks of `chunk` items.
/// Exceptions from any worker are rethrown on the calling thread.
template <class Body>
void parallel_for_chunks(std::size_t count, std::size_t workers, std::size_t chunk, Body&& body) {
  if (count == 0) return;
  chunk = std::max<std::size_t>(1, chunk);
  const std::size_t n_chunks = (count + chunk - 1) / chunk;
  workers = std::min(std::max<std::size_t>(1, workers), n_chunks);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto run = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= n_chunks) return;
      try {
        const std::size_t begin = c * chunk;
        body(begin, std::min(count, begin + chunk));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_chunks, std::memory_order_relaxed);
        return;
      }
    }
  };

  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

/// Pairwise (cascade) summation with a fixed split rule: the left half always
/// takes floor(n/2) items, leaves of 8 are summed left to right.
inline double pairwise_sum(std::span<const double> values) noexcept {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

struct SampleSummary {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

/// Sample mean and standard error of the mean (two-pass, pairwise sums).
inline SampleSummary summarize(std::span<const double> values) {
  SampleSummary out;
  out.count = values.size();
  if (values.empty()) return out;
  out.mean = pairwise_sum(values) / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  std::vector<double> sq(values.size());
  std::transform(values.begin(), values.end(), sq.begin(), [m = out.mean](double v) {
    const double d = v - m;
    return d * d;
  });
  const double var = pairwise_sum(sq) / static_cast<double>(values.size() - 1);
  out.std_error = std::sqrt(var / static_cast<double>(values.size()));
  return out;
}

}  // namespace irrsde
