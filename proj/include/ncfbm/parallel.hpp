#pragma once

#include <cstddef>
#include <functional>

namespace ncfbm {

/// Worker count: the value set by set_threads, else NCFBM_THREADS, else the
/// hardware concurrency (at least 1).
int thread_count();
void set_threads(int n);

/// Runs body(i) for i in [0,n) on thread_count() workers with static
/// contiguous chunks. Exceptions from workers are rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ncfbm
