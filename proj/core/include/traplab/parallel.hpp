#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace traplab {

// Fan a replica loop out over a fixed number of workers. Each replica must
// write only to its own pre-allocated slot and draw randomness only from a
// stream derived from its own index, so the result is identical for any
// worker count or scheduling order.
template <class Fn>
void for_each_replica(std::uint64_t n_replicas, unsigned workers, Fn&& fn) {
    if (workers <= 1 || n_replicas < 2 * workers) {
        for (std::uint64_t r = 0; r < n_replicas; ++r) fn(r);
        return;
    }
    constexpr std::uint64_t block = 256;
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t lo = next.fetch_add(block);
            if (lo >= n_replicas) return;
            const std::uint64_t hi = std::min(lo + block, n_replicas);
            for (std::uint64_t r = lo; r < hi; ++r) fn(r);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

} // namespace traplab
