#pragma once

#include <cstddef>
#include <functional>

namespace gapboot {

/// Caps the number of worker threads used by parallel_for (0 = hardware concurrency).
void set_max_threads(unsigned threads);
unsigned max_threads();

/// Runs body(i) for i in [0, count).  Work is split into contiguous chunks over
/// at most max_threads() workers; nested calls from inside a worker run
/// serially.  Results must be written by index so the outcome does not depend
/// on the worker count.  If several iterations throw, the exception from the
/// lowest index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace gapboot
