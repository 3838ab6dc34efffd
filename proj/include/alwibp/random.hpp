#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

// Deterministic randomness helpers. std::mt19937_64 has a fixed output
// sequence by the standard; the distribution adapters below are hand-rolled
// because the std::uniform_* distributions are implementation-defined and
// would break byte-identical artifacts across toolchains.

namespace alwibp {

using Rng = std::mt19937_64;

// FNV-1a, used both for checksums and for folding tags into seed material.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 14695981039346656037ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = fnv1a64(tag);
    // splitmix64 finalizer so that nearby seeds give unrelated streams
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull + h;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Unbiased integer draw from [lo, hi] via rejection.
inline long long uniform_int(Rng& rng, long long lo, long long hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0)  // full 64-bit range
        return static_cast<long long>(rng());
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return lo + static_cast<long long>(v % span);
}

// Uniform double in [0,1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) {
    return uniform_unit(rng) < p;
}

}  // namespace alwibp
