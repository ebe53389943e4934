#pragma once

#include <cstddef>
#include <functional>

namespace hres {

/// Number of worker threads used by quadrature loops. Defaults to 1.
void set_thread_count(int n);
int thread_count();

/// Runs body(i) for i in [0, n). Iterations may run concurrently; callers
/// write results into per-index slots so the outcome does not depend on
/// the thread count. Nested calls from inside a worker run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace hres
