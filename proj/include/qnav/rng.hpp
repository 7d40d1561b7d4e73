#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qnav::rng {

// All randomness in the project flows through std::mt19937_64 plus the
// helpers below. The standard fully specifies the engine's output, and the
// helpers use only arithmetic on that output, so streams are reproducible
// bit-for-bit for a given seed. std::uniform_real_distribution and friends
// are implementation-defined and must not be used.

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent stream from a base seed and a stream tag.
inline Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
    return Engine(splitmix64(seed + splitmix64(stream)));
}

// Uniform double in [0, 1) with 53 bits of precision.
inline double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n), unbiased via rejection.
inline std::uint64_t uniform_below(Engine& eng, std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t rem = std::numeric_limits<std::uint64_t>::max() % n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - rem;
    std::uint64_t x;
    do {
        x = eng();
    } while (x >= limit);
    return x % n;
}

// Standard normal via Box-Muller. Stateless: draws two uniforms per call.
inline double normal(Engine& eng) {
    double u1 = uniform01(eng);
    double u2 = uniform01(eng);
    while (u1 <= 0.0) u1 = uniform01(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

inline void fill_bytes(Engine& eng, std::uint8_t* out, std::size_t len) {
    std::size_t i = 0;
    while (i < len) {
        std::uint64_t w = eng();
        for (int b = 0; b < 8 && i < len; ++b, ++i) {
            out[i] = static_cast<std::uint8_t>(w >> (8 * b));
        }
    }
}

}  // namespace qnav::rng
