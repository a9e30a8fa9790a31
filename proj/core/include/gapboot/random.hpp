#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace gapboot {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Folds a master seed and a path of identifiers (cell, run, row, replicate, ...)
/// into one stream key.  Different paths give statistically independent streams.
constexpr std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t key = mix64(seed);
    for (auto id : path) key = mix64(key ^ mix64(id + 0x632be59bd9b4e019ULL));
    return key;
}

/// Counter-based generator: output k of stream `key` is mix64(key + k * golden).
/// Cheap to construct, so every replicate can own its stream and parallel
/// evaluation stays reproducible regardless of scheduling.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit constexpr CounterRng(std::uint64_t key) noexcept : state_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Unbiased draw from {0, ..., n-1} (Lemire's multiply-and-reject).
inline std::uint64_t uniform_index(CounterRng& rng, std::uint64_t n) noexcept {
    std::uint64_t x = rng();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            x = rng();
            m = static_cast<__uint128_t>(x) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(CounterRng& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace gapboot
