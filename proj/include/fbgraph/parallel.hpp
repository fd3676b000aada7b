#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace fbgraph {

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// Splits [0, n) into `workers` contiguous chunks and calls fn(worker, begin, end)
// for each. Worker w always receives the same chunk, so per-worker partial
// results can be merged in worker order for a reproducible reduction.
template <class Fn>
void parallel_chunks(std::size_t n, unsigned workers, Fn&& fn) {
    workers = std::max(1u, workers);
    auto chunk = [&](unsigned w) {
        const std::size_t b = n * w / workers;
        const std::size_t e = n * (w + 1) / workers;
        fn(w, b, e);
    };
    if (workers == 1) {
        chunk(0);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                chunk(w);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace fbgraph
