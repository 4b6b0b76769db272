#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace mise::detail {

/// Calls fn(i) for i in [0, n) on up to `threads` workers. Indices are dealt
/// round-robin; callers write results by index, so output never depends on
/// the thread count.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
}

} // namespace mise::detail
