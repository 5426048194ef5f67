#pragma once
// Contiguous block split of trial ranges over a worker pool. Callers keep
// determinism by (a) deriving all randomness from the trial index and (b)
// combining partials with exact arithmetic, so the worker count never
// changes a result.

#include <cstdint>
#include <thread>
#include <vector>

namespace bincover::detail {

inline unsigned resolve_workers(std::uint64_t trials, unsigned threads) {
    unsigned workers = threads != 0 ? threads : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    if (trials > 0 && workers > trials) workers = static_cast<unsigned>(trials);
    return workers;
}

// body(partial, first, last) runs on [first, last) trial blocks; the returned
// partials are ordered by block, ready for an exact sequential combine.
template <typename Partial, typename Body>
std::vector<Partial> run_blocks(std::uint64_t trials, unsigned threads, Body&& body) {
    const unsigned workers = resolve_workers(trials, threads);
    std::vector<Partial> parts(workers);
    if (workers == 1) {
        body(parts[0], std::uint64_t{0}, trials);
        return parts;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::uint64_t chunk = trials / workers;
    const std::uint64_t rem = trials % workers;
    std::uint64_t start = 0;
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t size = chunk + (w < rem ? 1 : 0);
        pool.emplace_back([&body, &parts, w, start, size] { body(parts[w], start, start + size); });
        start += size;
    }
    for (auto& th : pool) th.join();
    return parts;
}

} // namespace bincover::detail
