#pragma once

#include <functional>

namespace signrec {

// Number of worker threads implied by a --threads style setting:
// 0 picks the hardware concurrency, anything else is taken literally.
int resolve_threads(int requested);

// Runs fn(i) for i in [0, count) on up to `threads` workers.  Work items must
// not depend on execution order; the first exception thrown by any item is
// rethrown after all workers finish.
void parallel_for(long count, int threads, const std::function<void(long)>& fn);

}  // namespace signrec
