#pragma once

// Deterministic blocked parallelism. Work items are indexed; blocks are a
// fixed partition of the index range, pulled by workers in arbitrary order.
// Callers must write results into per-index slots or reduce commutatively
// (integer counts), so output is identical for any worker count.

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace sdlab {

inline void parallel_for_blocks(std::uint64_t n, int workers, std::uint64_t block_size,
                                const std::function<void(std::uint64_t, std::uint64_t)>& body) {
    if (workers < 1) workers = 1;
    if (block_size == 0) block_size = 1;
    const std::uint64_t n_blocks = (n + block_size - 1) / block_size;
    if (workers == 1 || n_blocks <= 1) {
        for (std::uint64_t b = 0; b < n_blocks; ++b)
            body(b * block_size, std::min(n, (b + 1) * block_size));
        return;
    }
    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            body(b * block_size, std::min(n, (b + 1) * block_size));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
}

} // namespace sdlab
