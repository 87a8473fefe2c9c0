#pragma once

#include <functional>

namespace fracture {

// Worker count: FRACTURE_THREADS if set (>= 1), otherwise hardware concurrency.
int thread_count();

// Runs body(i) for i in [0, n). Results must be written to per-index slots;
// the first exception by index is rethrown.
void parallel_for(int n, const std::function<void(int)>& body, int threads = 0);

}  // namespace fracture
