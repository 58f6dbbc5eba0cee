#pragma once

#include <cstddef>
#include <functional>

namespace ends {

// Pool size: ENDS_SCATTER_THREADS if set (>= 1), else hardware concurrency.
int worker_count();

// Runs fn(i) for i in [0, n). Results must be written by index; if several
// cells throw, the exception of the lowest index is rethrown. Nested calls run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ends
