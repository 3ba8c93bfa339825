#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace qmud {

// All stochastic operations take an explicit engine; nothing is global.
using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 20100301;

// SplitMix64 finalizer. Used to derive independent per-trial streams from
// (seed, stream, index) so results do not depend on thread scheduling.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept
{
    return mix_seed(mix_seed(mix_seed(seed) ^ stream) ^ index);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t index = 0)
{
    return Rng{derive_seed(seed, stream, index)};
}

// Uniform double in [0, 1). Implemented on top of the raw engine output so the
// stream is identical across standard libraries.
inline double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n), n >= 1. Rejection removes modulo bias.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n)
{
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

// Circularly-symmetric complex Gaussian with E|z|^2 = variance (Box-Muller).
inline std::complex<double> complex_normal(Rng& rng, double variance)
{
    if (variance <= 0.0) {
        return {0.0, 0.0};
    }
    const double u1 = 1.0 - uniform01(rng);  // (0, 1]
    const double u2 = uniform01(rng);
    const double r = std::sqrt(-variance * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace qmud
