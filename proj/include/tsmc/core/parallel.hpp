#pragma once

#include <cstddef>
#include <functional>

namespace tsmc {

/// Worker count: set_thread_count() if called, else TSMC_THREADS, else 1.
std::size_t thread_count();
/// 0 restores the environment default.
void set_thread_count(std::size_t n);

/// Runs body(i) for i in [0, n) across thread_count() workers using static
/// contiguous chunks. Results must not depend on scheduling, so bodies write
/// only to slot i. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace tsmc
