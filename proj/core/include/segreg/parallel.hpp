#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace segreg {

// Splits [0, n) into contiguous blocks and runs fn(begin, end) on up to
// `threads` workers. Per-element work must be independent; with that, the
// result is bit-identical for any thread count.
inline void parallel_for(int n, int threads, const std::function<void(int, int)>& fn) {
    if (n <= 0) return;
    threads = std::max(1, threads);
    if (threads == 1 || n < 2 * threads) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    const int block = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int b = t * block;
        const int e = std::min(n, b + block);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& th : pool) th.join();
}

// Deterministic reduction: [0, n) is cut into a fixed number of chunks
// (independent of the worker count), each chunk is summed serially, and the
// partials are combined in chunk order. Identical bits for any `threads`.
inline double parallel_sum(int n, int threads, const std::function<double(int, int)>& chunk_sum) {
    if (n <= 0) return 0.0;
    constexpr int kChunks = 64;
    const int nchunks = std::min(kChunks, n);
    const int block = (n + nchunks - 1) / nchunks;
    std::vector<double> partial(static_cast<std::size_t>(nchunks), 0.0);
    parallel_for(nchunks, threads, [&](int cb, int ce) {
        for (int c = cb; c < ce; ++c) {
            const int b = c * block;
            const int e = std::min(n, b + block);
            if (b < e) partial[static_cast<std::size_t>(c)] = chunk_sum(b, e);
        }
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

} // namespace segreg
