#pragma once

#include <cstddef>
#include <functional>

namespace mflda {

// Process-wide worker budget used by parallel_for. 1 disables threading.
void set_threads(int n);
int threads();

// Runs fn(i) for i in [0, n). Work items must write to disjoint,
// preallocated outputs; under that contract results are identical for any
// thread count. Nested calls run serially on the caller's thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mflda
