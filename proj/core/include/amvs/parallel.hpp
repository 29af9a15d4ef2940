#pragma once

#include <functional>

namespace amvs {

// Process-wide worker count used by every parallel loop in the library.
// Results never depend on it: each output cell is written by exactly one
// iteration and no reductions cross iteration boundaries.
void set_thread_count(int threads);
int thread_count();

// Runs body(i) for i in [begin, end), split into contiguous chunks.
// The first exception thrown by any chunk is rethrown on the caller.
void parallel_for(int begin, int end, const std::function<void(int)>& body);

}  // namespace amvs
