#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace folcomp {

/// Caps the number of worker threads used by node-parallel loops. Results
/// never depend on this value: every parallel loop writes disjoint slots and
/// reductions are order independent.
void set_thread_count(unsigned count);
unsigned thread_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). The first
/// exception thrown by any chunk is rethrown on the calling thread.
template <typename Body>
void parallel_chunks(std::size_t n, Body&& body) {
    const std::size_t workers =
        std::min<std::size_t>(thread_count(), std::max<std::size_t>(n / 256, 1));
    if (workers <= 1) {
        body(std::size_t{0}, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&body, &errors, w, begin, end] {
                try {
                    body(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
    parallel_chunks(n, [&body](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) body(i);
    });
}

/// Max-reduction of f(i) over [0, n). Per-index results are stored and
/// reduced sequentially, so the value is identical for any worker count.
template <typename F>
double parallel_max(std::size_t n, F&& f, double init = 0.0) {
    std::vector<double> values(n);
    parallel_for(n, [&](std::size_t i) { values[i] = f(i); });
    double best = init;
    for (double v : values) best = std::max(best, v);
    return best;
}

} // namespace folcomp
