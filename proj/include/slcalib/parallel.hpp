#pragma once

#include <functional>

namespace slcalib {

/** Worker count: the SLCALIB_THREADS environment variable when set to a
 *  positive integer, otherwise the hardware concurrency (at least 1). */
int thread_count();

/** Runs body(i) for i in [0, n) on contiguous index blocks across
 *  thread_count() workers.  The partition depends only on n and the
 *  worker count, so writes into preallocated per-index slots are
 *  deterministic.  Exceptions from workers are rethrown. */
void parallel_for(long n, const std::function<void(long)>& body);

}  // namespace slcalib
