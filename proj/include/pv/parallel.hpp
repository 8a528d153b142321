#pragma once

#include <cstddef>
#include <functional>

namespace pv {

// Number of worker threads: PATCHVORTEX_THREADS if set (clamped to >= 1),
// otherwise all hardware threads.
unsigned thread_budget();

// Splits [0, n) into contiguous chunks, one per worker. Each index is visited
// exactly once and chunk-internal order is ascending, so reductions that write
// per-index results are bit-identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

} // namespace pv
