#pragma once

#include <cstddef>
#include <functional>

namespace burnsight {

// Worker count from BURNSIGHT_THREADS, falling back to the hardware count.
std::size_t thread_count();

// Runs body(i) for i in [0, n) on up to `threads` workers using contiguous
// chunks. Results must be written by index; the first exception (lowest
// index) is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads = thread_count());

}  // namespace burnsight
