#pragma once
// Counter-based random streams. Every draw is a pure hash of
// (seed, stratum, sample, bounce, purpose), so results do not depend on
// worker count or scheduling order.

#include <cstdint>

namespace mcsbr {

enum class RngPurpose : uint64_t {
    kLaunchU = 0x101,
    kLaunchV = 0x102,
    kBranch = 0x201,
    kRoulette = 0x202,
};

namespace detail {

inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace detail

/// 64-bit hash of a draw key.
inline uint64_t counter_hash(uint64_t seed, uint64_t stratum, uint64_t sample,
                             uint64_t bounce, RngPurpose purpose) {
    uint64_t h = detail::mix64(seed ^ 0x2545f4914f6cdd1dull);
    h = detail::mix64(h ^ stratum);
    h = detail::mix64(h ^ (sample + 0x632be59bd9b4e019ull));
    h = detail::mix64(h ^ (bounce + 0x9e3779b97f4a7c15ull));
    h = detail::mix64(h ^ static_cast<uint64_t>(purpose));
    return h;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double counter_uniform(uint64_t seed, uint64_t stratum, uint64_t sample,
                              uint64_t bounce, RngPurpose purpose) {
    return static_cast<double>(counter_hash(seed, stratum, sample, bounce, purpose) >> 11) *
           0x1.0p-53;
}

}  // namespace mcsbr
