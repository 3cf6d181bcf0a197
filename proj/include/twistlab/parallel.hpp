// Deterministic block-parallel runner: work is split into indexed blocks,
// each block computes a value independently, and results are kept in block
// order so downstream merges never depend on the thread schedule.
#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace twistlab {

inline int effective_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Runs fn(block_index) for block_index in [0, n_blocks) on `threads`
/// workers, returning the per-block results in index order. The first
/// exception thrown by any block is rethrown after all workers join.
template <typename R>
std::vector<R> run_blocks(std::size_t n_blocks, int threads, const std::function<R(std::size_t)>& fn) {
  std::vector<R> results(n_blocks);
  threads = effective_threads(threads);
  if (threads <= 1 || n_blocks <= 1) {
    for (std::size_t i = 0; i < n_blocks; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n_blocks || failed.load()) return;
      try {
        results[i] = fn(i);
      } catch (...) {
        std::lock_guard lk(error_mu);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int n_workers = static_cast<int>(std::min<std::size_t>(threads, n_blocks));
  pool.reserve(n_workers);
  for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

}  // namespace twistlab
