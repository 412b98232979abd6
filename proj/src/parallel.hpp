#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace qmimo::detail {

/// Runs fn(i) for i in [0, n) on `workers` threads. Results land in slot i,
/// so the caller can fold them in index order. Failures are reported per index.
template <typename Result, typename Fn>
std::vector<Result> parallel_map(std::size_t n, int workers, Fn fn,
                                 std::vector<std::exception_ptr>& errors) {
  std::vector<Result> out(n);
  errors.assign(n, nullptr);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::max(1, workers));
  if (n_threads == 1 || n <= 1) {
    run();
    return out;
  }
  std::vector<std::jthread> pool;
  pool.reserve(std::min(n_threads, n));
  for (std::size_t t = 0; t < std::min(n_threads, n); ++t) pool.emplace_back(run);
  pool.clear();  // joins
  return out;
}

}  // namespace qmimo::detail
