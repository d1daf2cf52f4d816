#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace stpanel {

/// Deterministic parallel loop: work item i writes only to slot i of some
/// preallocated output, so the result is identical for any worker count.
/// n_workers <= 1 runs inline.
template <typename Fn>
void parallel_for(std::size_t count, int n_workers, Fn&& fn) {
    if (n_workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(n_workers, count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t wkr = 0; wkr < workers; ++wkr) {
        pool.emplace_back([&, wkr] {
            for (std::size_t i = wkr; i < count; i += workers) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace stpanel
