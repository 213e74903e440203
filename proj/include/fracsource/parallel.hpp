#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#if defined(FRACSOURCE_HAVE_OPENMP)
#include <omp.h>
#endif

namespace fracsource::par {

// Execution mode for the data-parallel kernels. Every parallel loop in the
// toolkit is an independent-output map, so serial and OpenMP execution give
// bitwise identical results; the serial path is kept as the reference the
// tests compare against and the benchmark baseline.
enum class Mode { serial, openmp };

inline Mode& execution_mode() {
#if defined(FRACSOURCE_HAVE_OPENMP)
    static Mode mode = Mode::openmp;
#else
    static Mode mode = Mode::serial;
#endif
    return mode;
}

inline int max_threads() {
#if defined(FRACSOURCE_HAVE_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Exceptions may not cross an OpenMP region; capture the first one and
// rethrow on the calling thread.
template <typename Body>
void parallel_for(std::ptrdiff_t n, Body&& body) {
    if (execution_mode() == Mode::serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
        return;
    }
#if defined(FRACSOURCE_HAVE_OPENMP)
    std::exception_ptr first_error = nullptr;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical(fracsource_parallel_error)
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
#else
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
#endif
}

class ScopedMode {
public:
    explicit ScopedMode(Mode m) : saved_(execution_mode()) { execution_mode() = m; }
    ~ScopedMode() { execution_mode() = saved_; }

private:
    Mode saved_;
};

} // namespace fracsource::par
