#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace twobit {

/// Runs body(i) for i in [0, n) over contiguous chunks on worker threads.
/// Callers write results into per-index slots, so the outcome never depends
/// on the worker count.
template <typename Body>
void parallel_for(std::size_t n, Body&& body, std::size_t workers = 0) {
    if (workers == 0) {
        workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t t = 0; t < workers; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) {
            break;
        }
        pool.emplace_back([&body, begin, end] {
            for (std::size_t i = begin; i < end; ++i) {
                body(i);
            }
        });
    }
}

} // namespace twobit
