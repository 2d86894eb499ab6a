#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace ringlab {

enum class Execution { serial, parallel };

// Thread count for parallel kernels: RINGLAB_THREADS if set (>= 1),
// otherwise the OpenMP default.
int thread_cap();

namespace detail {
void parallel_for_impl(std::size_t n, void (*body)(std::size_t, void*), void* ctx);
}

// Runs f(i) for i in [0, n). Iterations must be independent. The first
// exception thrown by any iteration is rethrown after the loop.
template <class F>
void parallel_for(std::size_t n, Execution ex, F&& f) {
    if (ex == Execution::serial || n < 2) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    struct Ctx {
        F* f;
        std::exception_ptr err;
        std::mutex m;
    } ctx{&f, nullptr, {}};
    detail::parallel_for_impl(
        n,
        [](std::size_t i, void* p) {
            auto* c = static_cast<Ctx*>(p);
            try {
                (*c->f)(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(c->m);
                if (!c->err) c->err = std::current_exception();
            }
        },
        &ctx);
    if (ctx.err) std::rethrow_exception(ctx.err);
}

}  // namespace ringlab
