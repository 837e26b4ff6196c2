#pragma once

#include <cstddef>
#include <functional>

namespace emstress {

/// Number of worker threads used by parallel_for. Defaults to the value of
/// EMSTRESS_THREADS, or 1 when unset.
int thread_count();
void set_thread_count(int n);

/// Runs task(i) for i in [0, n). Tasks must write to disjoint outputs; callers
/// reduce the per-task results in index order so the outcome does not depend
/// on the number of threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

} // namespace emstress
