#pragma once

#include <cstddef>
#include <functional>

namespace kinc {

// Worker cap: KAPPA_INCOME_THREADS if set to a positive integer, otherwise
// the hardware concurrency (at least 1).
unsigned default_thread_count();

// Runs body(i) for i in [0, count) on up to `threads` workers (0 = default).
// Callers write results by index, so output never depends on scheduling.
// The first exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace kinc
