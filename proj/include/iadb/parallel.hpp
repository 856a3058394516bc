#pragma once

#include <cstddef>
#include <cstdlib>
#include <vector>

#include <omp.h>

namespace iadb {

/// Effective worker count: OpenMP's limit, optionally capped by the
/// IADB_THREADS environment variable.
inline int max_threads() {
  static const int cached = [] {
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("IADB_THREADS")) {
      const long cap = std::strtol(env, nullptr, 10);
      if (cap >= 1 && cap < n) n = static_cast<int>(cap);
    }
    return n;
  }();
  return cached;
}

/// Parallel loop over independent items. Each index writes only its own
/// outputs, so results do not depend on the thread count.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  const int threads = max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (long long i = 0; i < static_cast<long long>(n); ++i) f(static_cast<std::size_t>(i));
}

/// Fixed block size for deterministic reductions. The partition does not
/// depend on the thread count, and partials are combined in block order, so
/// reduced values are bit-identical no matter how many threads run.
inline constexpr std::size_t kReduceBlock = 64;

inline std::size_t block_count(std::size_t n) { return (n + kReduceBlock - 1) / kReduceBlock; }

/// Deterministic map-reduce: `accumulate(block_acc, i)` folds item i into a
/// block-local accumulator (in index order within the block), `combine`
/// folds block accumulators into `total` in block order.
template <class Acc, class MakeAcc, class Accumulate, class Combine>
void blocked_reduce(std::size_t n, Acc& total, MakeAcc&& make_acc, Accumulate&& accumulate,
                    Combine&& combine) {
  const std::size_t nblocks = block_count(n);
  std::vector<Acc> partials;
  partials.reserve(nblocks);
  for (std::size_t b = 0; b < nblocks; ++b) partials.push_back(make_acc());
  const int threads = max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
    const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
    for (std::size_t i = lo; i < hi; ++i) accumulate(partials[static_cast<std::size_t>(b)], i);
  }
  for (std::size_t b = 0; b < nblocks; ++b) combine(total, partials[b]);
}

}  // namespace iadb
