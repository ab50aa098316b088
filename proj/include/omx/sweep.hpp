#pragma once

#include <cstddef>
#include <exception>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace omx {

enum class Exec { serial, parallel };

// Serial reference path; the parallel kernel must match it bitwise because
// every index writes only its own slot.
template <class F>
void serial_for_indexed(std::size_t n, F&& f)
{
    for (std::size_t i = 0; i < n; ++i)
        f(i);
}

// OpenMP worker pool over [0, n). num_threads <= 0 uses the runtime default.
// The first exception raised by any index is rethrown after the loop.
template <class F>
void parallel_for_indexed(std::size_t n, F&& f, int num_threads = 0)
{
#if defined(_OPENMP)
    std::exception_ptr err = nullptr;
    const int threads = num_threads > 0 ? num_threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        try {
            f(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(omx_sweep_err)
            if (!err)
                err = std::current_exception();
        }
    }
    if (err)
        std::rethrow_exception(err);
#else
    (void)num_threads;
    serial_for_indexed(n, f);
#endif
}

template <class F>
void for_indexed(std::size_t n, F&& f, Exec exec, int num_threads = 0)
{
    if (exec == Exec::parallel)
        parallel_for_indexed(n, f, num_threads);
    else
        serial_for_indexed(n, f);
}

inline int available_threads()
{
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace omx
