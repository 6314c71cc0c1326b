#pragma once

#include <cstddef>
#include <functional>

namespace nodal {

/// requested > 0 wins; otherwise NODAL_CENSUS_THREADS, then the hardware
/// concurrency, then 1.
int resolve_threads(int requested);

/// Calls body(i) for i in [0, count) on up to `threads` workers. Indices are
/// handed out dynamically; the first exception thrown by any call is
/// rethrown after all workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace nodal
