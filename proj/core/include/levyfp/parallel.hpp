#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

#include "levyfp/rng.hpp"

namespace levyfp {

inline unsigned default_worker_count() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

// Deterministic block-parallel driver.
//
// Work items [0, n_items) are split into fixed blocks of `block_size`.  Each
// item draws from its own RngStream derived from (master_seed, item_index),
// and each block accumulates into its own Acc in item order.  Workers claim
// whole blocks, so the returned per-block accumulators — and any fold over
// them done in block order — are identical for every worker count, including
// bitwise-identical floating point sums.
//
// ItemFn signature: void(Acc&, std::uint64_t item_index, RngStream&).
template <class Acc, class ItemFn>
std::vector<Acc> run_blocks(std::uint64_t master_seed, std::uint64_t n_items,
                            std::uint64_t block_size, unsigned workers, ItemFn fn) {
    if (block_size == 0) block_size = 1;
    const std::uint64_t n_blocks = (n_items + block_size - 1) / block_size;
    std::vector<Acc> blocks(static_cast<std::size_t>(n_blocks));
    if (n_blocks == 0) return blocks;
    if (workers == 0) workers = default_worker_count();
    if (workers > n_blocks) workers = static_cast<unsigned>(n_blocks);

    std::atomic<std::uint64_t> next_block{0};
    auto work = [&] {
        for (;;) {
            const std::uint64_t b = next_block.fetch_add(1, std::memory_order_relaxed);
            if (b >= n_blocks) return;
            Acc& acc = blocks[static_cast<std::size_t>(b)];
            const std::uint64_t begin = b * block_size;
            const std::uint64_t end = std::min(n_items, begin + block_size);
            for (std::uint64_t i = begin; i < end; ++i) {
                RngStream rng(master_seed, i);
                fn(acc, i, rng);
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return blocks;
}

// Fold helper: sequential, block-order reduction of run_blocks output.
template <class Acc, class Merge>
Acc fold_blocks(std::vector<Acc>&& blocks, Merge merge) {
    Acc total{};
    for (auto& b : blocks) merge(total, b);
    return total;
}

} // namespace levyfp
