#pragma once

#include <cassert>
#include <cstdint>
#include <random>
#include <vector>

namespace axirank {

// std::mt19937_64 produces a standard-mandated bit sequence, but the
// std::uniform_* distributions are implementation-defined. Every random draw
// in this project goes through the helpers below so that a (seed, stream)
// pair pins results bitwise on any conforming toolchain.
using Rng = std::mt19937_64;

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Named sub-streams derived from one user seed. Keeping them independent
// matters: e.g. disabling perturbation generation must not change how
// batches are shuffled.
enum class RngStream : uint64_t {
    kParamInit = 1,
    kShuffle = 2,
    kPerturb = 3,
    kSubsample = 4,
    kSynth = 5,
    kAudit = 6,
    kDevSubsample = 7,
};

inline Rng make_rng(uint64_t seed, RngStream stream) {
    return Rng(splitmix64(splitmix64(seed) + static_cast<uint64_t>(stream)));
}

// Unbiased integer in [0, n) via rejection sampling.
inline uint64_t uniform_below(Rng& rng, uint64_t n) {
    assert(n > 0);
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x = rng();
    while (x >= limit) x = rng();
    return x % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(rng);
}

// Fisher-Yates using uniform_below, for reproducible shuffles.
template <typename T>
void shuffle_vec(Rng& rng, std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
        const size_t j = static_cast<size_t>(uniform_below(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace axirank
