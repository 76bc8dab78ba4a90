#pragma once

#include <functional>

namespace strokefit {

/// Worker count from STROKEFIT_THREADS (0 or unset = hardware concurrency).
int thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads. Each index
/// is handled exactly once; callers write results into per-index slots.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace strokefit
