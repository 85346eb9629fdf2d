#pragma once
// Plane-wave ray state propagation shared by both solvers: phase
// accumulation, interface transforms, and branch bookkeeping. The engine
// exposes every physical branch and never chooses between them; sampling
// strategy is the solver's concern.

#include <vector>

#include "mcsbr/em_math.hpp"
#include "mcsbr/geometry.hpp"

namespace mcsbr {

/// One GO ray in flight. Both transmit polarizations share the geometry, so
/// the state carries a field vector per launch polarization.
struct PathState {
    Vec3 origin;
    Vec3 dir;
    ComplexVec3 e[2];      // field per transmit polarization, transverse to dir
    double phi = 0.0;      // accumulated optical path, meters
    double prob = 1.0;     // product of branch probabilities
    double weight = 1.0;   // product of roulette 1/(1-q) factors
    double medium_n = 1.0; // refractive index of the current medium
    int bounce = 0;
    uint32_t stratum = 0;
    uint32_t sample = 0;
    bool alive = true;
};

struct BranchOutcome {
    Branch kind;
    Vec3 new_dir;
    ComplexVec3 new_e[2];
    double new_n = 1.0;
    double branch_prob = 1.0;
};

/// Result of expanding a hit into its physical outcomes. When `grazing` the
/// path must be terminated and counted (near-singular transform).
struct BranchSet {
    BranchOutcome outcomes[2];
    int count = 0;
    bool grazing = false;
    InterfaceCoefficients coeffs;
    SpBasis basis;
};

/// Start a path at a launch-rect sample. phi is initialized to
/// n_ambient * dot(k_inc, p1) so equal-wavefront launch points carry equal
/// phase regardless of the rect's standoff.
PathState init_path(const Vec3& rect_sample, const Vec3& k_inc, const ComplexVec3& e0_v,
                    const ComplexVec3& e0_h, double ambient_n);

/// Move the state to the hit point: phi += medium_n * distance, bounce++.
void advance(PathState& state, const Hit& hit);

/// Expand a hit into reflect/transmit outcomes (1 on PEC or TIR, else 2).
BranchSet branch_outcomes(const PathState& state, const Hit& hit);

}  // namespace mcsbr
