#pragma once

#include <cstddef>
#include <functional>

namespace phi4 {

/// Worker count: PHI4_THREADS when set, else the hardware concurrency.
int worker_count();

/// Runs body(i) for i in [0, n) on worker_count() threads. Indices are handed
/// out dynamically; callers write results by index so the outcome does not
/// depend on scheduling. The first exception thrown by a body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace phi4
