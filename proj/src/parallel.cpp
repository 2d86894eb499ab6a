#include "ringlab/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace ringlab {

int thread_cap() {
    if (const char* env = std::getenv("RINGLAB_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
        }
    }
    return omp_get_max_threads();
}

namespace detail {

void parallel_for_impl(std::size_t n, void (*body)(std::size_t, void*), void* ctx) {
    const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_cap())
    for (long i = 0; i < count; ++i) body(static_cast<std::size_t>(i), ctx);
}

}  // namespace detail

}  // namespace ringlab
