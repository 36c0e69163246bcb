#pragma once

#include <cstddef>
#include <functional>

namespace asplat {

/// Worker count from ASPLAT_THREADS (unset or 0 = hardware concurrency).
int worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads. Each index is
/// visited exactly once; callers write results to per-index slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace asplat
