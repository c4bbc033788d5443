#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace eqp {

/// Evaluates f(i) for i in [0, n) on `workers` threads, each taking one
/// contiguous slice. Results come back in index order whatever the worker
/// count; the first exception thrown by any worker is rethrown.
template <class R, class F>
std::vector<R> parallel_map(std::size_t n, unsigned workers, F f) {
    std::vector<R> out(n);
    workers = static_cast<unsigned>(std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                const std::size_t first = n * w / workers;
                const std::size_t last = n * (w + 1) / workers;
                try {
                    for (std::size_t i = first; i < last; ++i) out[i] = f(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace eqp
