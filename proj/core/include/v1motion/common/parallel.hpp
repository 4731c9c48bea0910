#pragma once

#include <cstddef>
#include <functional>

namespace v1motion {

/// Runs body(i) for i in [0, n) on up to `threads` workers.
///
/// Work is split into contiguous index ranges. Callers must write each
/// result into its own slot and reduce afterwards in index order; under that
/// rule the output does not depend on the thread count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

/// Number of hardware threads, at least 1.
int hardware_threads();

}  // namespace v1motion
