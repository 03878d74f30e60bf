#pragma once

#include <functional>

namespace lwocp::detail {

/// Worker count: LWOCP_THREADS if set, else hardware concurrency.
int thread_count();

/// Runs fn(0), ..., fn(count-1) across a small thread pool. Each index is
/// processed exactly once; callers own any output slots, so results are
/// deterministic regardless of schedule. Nested calls from inside a worker
/// run serially instead of oversubscribing. The first exception thrown by a
/// worker is rethrown on the calling thread.
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace lwocp::detail
