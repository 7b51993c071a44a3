// Deterministic fork-join over contiguous index ranges. Chunks only
// partition work: every cell's value is computed from the immutable input
// snapshot, so results are identical for any worker count.
#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace gridscout {

template <typename Fn>
inline void parallel_chunks(std::int64_t n, int threads, Fn&& fn) {
    if (n <= 0) return;
    if (threads <= 1 || n < 256) {
        fn(std::int64_t{0}, n);
        return;
    }
    const int workers = static_cast<int>(std::min<std::int64_t>(threads, n));
    const std::int64_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        const std::int64_t begin = w * chunk;
        const std::int64_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace gridscout
