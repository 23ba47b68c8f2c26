#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace moreau {

/// Runs fn(i) for i in [0, n) on up to `threads` threads, in contiguous blocks.
/// fn must only write to state owned by index i; results never depend on the thread count.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t t = std::min<std::size_t>(threads, n);
    const std::size_t block = (n + t - 1) / t;
    std::vector<std::jthread> pool;
    pool.reserve(t);
    for (std::size_t w = 0; w < t; ++w) {
        const std::size_t a = w * block, b = std::min(n, a + block);
        if (a >= b) break;
        pool.emplace_back([&fn, a, b] {
            for (std::size_t i = a; i < b; ++i) fn(i);
        });
    }
}

}  // namespace moreau
