#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <random>
#include <thread>
#include <vector>

namespace armeval {

/// Run fn(i) for i in [0, n) on up to `parallelism` threads. Callers write
/// results into per-index slots, so output order never depends on
/// scheduling. If any call throws, the exception from the lowest index is
/// rethrown after all workers finish.
template <typename F>
void parallel_for(std::size_t n, std::size_t parallelism, F&& fn) {
    const std::size_t workers = std::max<std::size_t>(1, std::min(parallelism, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Stateless 64-bit mixer used to derive independent per-item seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Index in [0, n) from one 64-bit draw (multiply-shift). Unlike
/// std::uniform_int_distribution this is identical on every standard library.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    // High 64 bits of the 128-bit product, from 32-bit halves.
    const std::uint64_t x = rng(), y = n;
    const std::uint64_t xl = x & 0xFFFFFFFFu, xh = x >> 32, yl = y & 0xFFFFFFFFu, yh = y >> 32;
    const std::uint64_t ll = xl * yl, lh = xl * yh, hl = xh * yl, hh = xh * yh;
    const std::uint64_t mid = (ll >> 32) + (lh & 0xFFFFFFFFu) + (hl & 0xFFFFFFFFu);
    return static_cast<std::size_t>(hh + (lh >> 32) + (hl >> 32) + (mid >> 32));
}

inline bool fair_coin(std::mt19937_64& rng) { return (rng() >> 63) != 0; }

}  // namespace armeval
