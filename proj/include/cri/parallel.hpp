#pragma once

#include <cstddef>
#include <functional>

namespace cri {

// Worker count from CRI_THREADS (0 or unset = hardware concurrency).
unsigned worker_count();

// Runs body(i) for i in [0, count) over `workers` threads. Each index is run
// exactly once; callers write results into per-index slots so the outcome
// does not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, unsigned workers = 0);

}  // namespace cri
