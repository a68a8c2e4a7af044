#pragma once

#include <cstddef>
#include <functional>

namespace curvgraph {

// Worker count for internal parallel loops. 0 restores the default
// (CURVGRAPH_THREADS, else hardware concurrency).
void set_thread_count(std::size_t threads);
std::size_t thread_count();

// Runs body(i) for i in [0, count). Each index is processed exactly once;
// the first exception thrown is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace curvgraph
