#pragma once

#include <cstdint>
#include <functional>

namespace salrate {

/// Worker cap from SALRATE_THREADS (0 or unset means hardware concurrency).
int thread_budget();

/// Runs fn(0..n-1) across at most thread_budget() threads with a static
/// contiguous split. Callers keep determinism by writing each index's result
/// to its own slot. The first exception thrown by any worker is rethrown.
void parallel_for(int64_t n, const std::function<void(int64_t)>& fn);

}  // namespace salrate
