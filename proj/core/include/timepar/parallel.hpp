#pragma once

#include <cstddef>

namespace timepar {

/// Sets the process-wide worker count used by every parallel loop.
/// Values < 1 restore the OpenMP default.
void set_num_threads(int threads);

/// Current worker count.
int num_threads();

/// Runs body(i) for i in [0, count), distributing indices over the worker
/// pool with a static schedule. body must only write state owned by index i.
template <typename Body>
void parallel_for(std::ptrdiff_t count, Body&& body)
{
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        body(i);
    }
}

}  // namespace timepar
