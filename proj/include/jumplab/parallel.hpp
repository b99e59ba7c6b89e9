#pragma once

#include <cstddef>
#include <functional>

namespace jumplab {

/// Number of worker threads: min(hardware_concurrency, JUMPLAB_THREADS if set).
/// Always >= 1.
size_t worker_count();

/// Run fn(i) for i in [0, n) across worker threads. Contiguous index blocks per
/// thread; callers get determinism by writing to disjoint, index-addressed slots
/// and reducing sequentially afterwards. Exceptions from workers are rethrown.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

} // namespace jumplab
