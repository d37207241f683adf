#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace substrat::parallel {

/// Caps the number of worker threads used by the reductions below.
/// Values < 1 are clamped to 1.
void set_max_threads(int n);
int max_threads();

/// Reads SUBSTRAT_THREADS; returns 0 when unset or unparsable.
int threads_from_environment();

inline constexpr std::size_t kBlockSize = 64;

/// Sums fn(i) over [0, count). Elements are grouped into fixed blocks of
/// kBlockSize summed left to right, and the block partials are combined by a
/// pairwise tree. The grouping does not depend on the thread count, so the
/// result is bit-identical for any number of workers.
template <class T, class Fn>
T deterministic_sum(std::size_t count, Fn&& fn, T zero) {
  if (count == 0) return zero;
  const std::size_t blocks = (count + kBlockSize - 1) / kBlockSize;
  std::vector<T> partial(blocks, zero);
  auto run_block = [&](std::size_t b) {
    const std::size_t lo = b * kBlockSize;
    const std::size_t hi = std::min(count, lo + kBlockSize);
    T acc = zero;
    for (std::size_t i = lo; i < hi; ++i) acc += fn(i);
    partial[b] = acc;
  };
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(max_threads()), blocks);
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t b = w; b < blocks; b += workers) run_block(b);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (std::size_t stride = 1; stride < blocks; stride *= 2) {
    for (std::size_t i = 0; i + stride < blocks; i += 2 * stride) {
      partial[i] += partial[i + stride];
    }
  }
  return partial[0];
}

/// Runs fn(i) for i in [0, count) on up to max_threads() workers. fn must
/// only write to slots owned by index i.
template <class Fn>
void for_each_index(std::size_t count, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(max_threads()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace substrat::parallel
