#pragma once
// Shared helpers for the test binaries.

#include <cmath>
#include <random>

#include "mcsbr/em_math.hpp"

namespace mcsbr::test {

inline double db20(double mag) { return 20.0 * std::log10(std::max(mag, 1e-300)); }

inline Vec3 random_unit(std::mt19937& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec3 v{g(rng), g(rng), g(rng)};
    while (norm(v) < 1e-3) v = Vec3{g(rng), g(rng), g(rng)};
    return normalized(v);
}

/// Random direction/normal pair with dot(dir, normal) < -cos_floor.
inline std::pair<Vec3, Vec3> random_incidence(std::mt19937& rng, double cos_floor = 1e-3) {
    for (;;) {
        const Vec3 dir = random_unit(rng);
        const Vec3 normal = random_unit(rng);
        const double dn = dot(dir, normal);
        if (dn < -cos_floor) return {dir, normal};
        if (dn > cos_floor) return {dir, -normal};
    }
}

}  // namespace mcsbr::test
