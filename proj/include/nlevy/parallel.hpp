#pragma once

#include <cstddef>
#include <functional>

namespace nlevy {

// Deterministic data parallelism. Work items are split into contiguous static
// chunks; every item writes only its own output slot, so results are
// bit-identical for any worker count. Reductions must be done by the caller
// in a fixed order (e.g. over a vector of per-chunk partials).

void set_worker_count(int n);
int worker_count();

/// Runs fn(i) for i in [0, n). fn must not touch shared mutable state other
/// than slot i of its output.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Chunked variant: fn(begin, end) over disjoint ranges.
void parallel_for_chunks(std::size_t n,
                         const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace nlevy
