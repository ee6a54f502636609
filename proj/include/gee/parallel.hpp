#ifndef GEE_PARALLEL_HPP
#define GEE_PARALLEL_HPP

#include <functional>

#include "gee/types.hpp"

namespace gee {

/// Thread count to use: `requested` if positive, else the GEE_NUM_THREADS
/// environment variable, else the hardware concurrency.
int resolve_threads(int requested = 0);

/// Runs body(0..count-1) on up to `threads` workers, pulling indices from a
/// shared counter. The first exception thrown by any body is rethrown.
void parallel_for(Index count, int threads, const std::function<void(Index)>& body);

}  // namespace gee

#endif  // GEE_PARALLEL_HPP
