#pragma once

#include <cstddef>
#include <functional>

namespace siftwood::parallel {

// Process-wide cap on worker threads. 0 means "use hardware concurrency".
void set_max_threads(unsigned n);
unsigned max_threads();

// Runs fn(i) for i in [0, n). Work items must be independent; callers write
// results into pre-sized slots so output never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace siftwood::parallel
