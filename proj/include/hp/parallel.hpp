#pragma once

#include <cstddef>
#include <functional>

namespace hp {

/// Worker count used by every data-parallel loop in the library. Defaults to
/// HP_THREADS when set, otherwise the hardware concurrency.
int thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [0, n) on the worker pool. Items must not share
/// mutable state. The first exception thrown by any item is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace hp
