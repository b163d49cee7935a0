#pragma once

#include <cstddef>

namespace csgld {

// Serial reference vs OpenMP execution. Both paths run the identical chunk
// decomposition (fixed chunk size, partials combined in index order), so
// results are bit-identical regardless of policy or thread count; the serial
// path exists as the reference implementation for tests and benchmarks.
enum class exec_policy { serial, openmp };

inline constexpr long kChunkSize = 8192;

inline long chunk_count(long n) { return (n + kChunkSize - 1) / kChunkSize; }

// Applies fn(chunk_index, begin, end) over [0, n) in fixed chunks. Chunks may
// run concurrently under exec_policy::openmp; fn must only write to
// chunk-indexed slots.
template <class Fn>
void for_each_chunk(long n, exec_policy policy, Fn&& fn) {
    const long chunks = chunk_count(n);
    const bool par = policy == exec_policy::openmp;
#pragma omp parallel for schedule(static) if (par)
    for (long c = 0; c < chunks; ++c) {
        const long begin = c * kChunkSize;
        const long end = begin + kChunkSize < n ? begin + kChunkSize : n;
        fn(c, begin, end);
    }
}

}  // namespace csgld
