#pragma once

#include <cstddef>
#include <functional>

namespace ceo::numerics {

/// Runs body(i) for i in [0, count) on up to `threads` workers. Tasks are
/// handed out in contiguous chunks; the caller owns any per-index output so
/// results never depend on scheduling. threads == 0 means hardware
/// concurrency. The first exception thrown by a task is rethrown.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

/// Thread count from the CEO_THREADS environment variable, or 0 if unset.
std::size_t threads_from_environment();

}  // namespace ceo::numerics
