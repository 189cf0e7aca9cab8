#pragma once

// Portable deterministic sampling. std::*_distribution output is implementation
// defined, so everything seeded in this library goes through these helpers.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <utility>

namespace gliofuse {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and a stream index.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept
{
    return splitmix64(splitmix64(base) ^ (stream * 0xD1B54A32D192ED03ULL));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi)
{
    return lo + (hi - lo) * uniform01(rng);
}

/// Unbiased integer in [0, n) by rejection.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n)
{
    if (n <= 1) {
        return 0;
    }
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r = rng();
    while (r >= limit) {
        r = rng();
    }
    return r % n;
}

/// Standard normal via Box-Muller (one value per call; the pair's second half is discarded).
inline double normal(Rng& rng, double mean = 0.0, double stddev = 1.0)
{
    double u1 = uniform01(rng);
    while (u1 <= 0.0) {
        u1 = uniform01(rng);
    }
    const double u2 = uniform01(rng);
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

template <typename T>
void shuffle(std::span<T> values, Rng& rng)
{
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(values[i - 1], values[j]);
    }
}

} // namespace gliofuse
