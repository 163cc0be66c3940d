#pragma once

#include <cstddef>
#include <functional>

namespace spinmu {

// Number of workers used by parallel_for: SPINMU_THREADS if set (>=1),
// otherwise hardware concurrency.
std::size_t worker_count();

// Runs fn(i) for i in [0, count) across a small thread pool. Each index is
// processed exactly once; results must be written to per-index slots so the
// outcome is independent of scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace spinmu
