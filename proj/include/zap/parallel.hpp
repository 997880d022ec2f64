#pragma once

#include <cstddef>
#include <functional>

namespace zap {

// Effective worker count: `requested` if positive, else the ZAP_THREADS
// environment variable, else hardware concurrency.
int resolve_threads(int requested);

// Runs fn over [begin, end) split into contiguous chunks across `threads`
// workers.  fn receives (chunk_begin, chunk_end).  Results must not depend on
// the chunking: callers write to disjoint slots and reduce sequentially
// afterwards, which keeps every pipeline byte-identical for any thread count.
void parallel_chunks(std::size_t begin, std::size_t end, int threads,
                     const std::function<void(std::size_t, std::size_t)>& fn);

// Convenience per-index map.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace zap
