#pragma once
// Converts a ray arriving at a surface point into MECA equivalent currents
// and a far-field contribution, and reduces contribution streams into
// complex sqrt-RCS frequency sweeps.
//
// Currents are stored with the free-space impedance factored out (A_J holds
// eta0*J) so amplitude vectors stay O(|E|). Contributions are frequency
// independent; k0-dependent factors apply at evaluation time, which is what
// makes trace-once / evaluate-all-frequencies work for lossless media.

#include <cstdint>
#include <string>
#include <vector>

#include "mcsbr/path_engine.hpp"

namespace mcsbr {

enum class ScatterCase { kPec, kEntering, kExiting };

/// eta0-scaled electric current and magnetic current for one arrival event.
struct SurfaceCurrents {
    ComplexVec3 j;  // eta0 * J
    ComplexVec3 m;  // M (already O(|E|))
};

/// Equivalent currents at a hit. The entering case uses incident + reflected
/// fields on the illuminated side; the exiting case uses the transmitted
/// field on the far (ambient) side, radiating along the outward normal.
/// Exiting under TIR yields zero currents (no propagating transmitted wave).
SurfaceCurrents meca_currents(const Hit& hit, const ComplexVec3& e_incident, const Vec3& dir_in,
                              ScatterCase scatter_case);

/// Hot-loop variant reusing the coefficients/basis from branch_outcomes.
SurfaceCurrents meca_currents(const Hit& hit, const ComplexVec3& e_incident, const Vec3& dir_in,
                              ScatterCase scatter_case, const InterfaceCoefficients& coeffs,
                              const SpBasis& basis, double medium_n);

/// Characteristic function: 1 iff the surface element borders the ambient
/// exterior medium and (when enabled) the exit direction is unobstructed.
bool chi_visibility(const Scene& scene, const Vec3& exit_point, bool exterior_facing,
                    const Vec3& k_scatter, bool occlusion_enabled);

/// Frequency-independent record of one far-field scattering event.
struct Contribution {
    ComplexVec3 a_j[2];  // per transmit polarization, eta0*J with all weights
    ComplexVec3 a_m[2];
    double phi_total = 0.0;  // meters
    Vec3 exit_point;
    int bounce = 0;
    uint64_t order_key = 0;  // (stratum, sample, event) for deterministic reduction
};

/// Assemble a contribution. area_weight carries the quadrature/sampling area
/// factor (cell area for the midpoint rule, cell area / samples-per-stratum
/// for stratified MC); the path's probability and roulette weight divide in.
Contribution make_contribution(const PathState& state, const Hit& hit,
                               const SurfaceCurrents currents[2], double area_weight,
                               uint64_t order_key);

/// Receiver/transmit polarization channels; first letter receives.
enum PolChannel : int { kVV = 0, kHH = 1, kVH = 2, kHV = 3 };
inline constexpr int kPolChannelCount = 4;

struct SweepGrid {
    std::vector<double> frequencies;  // Hz, strictly increasing
    Vec3 k_scatter;                   // unit scattering direction
    Vec3 rx_v;                        // receiver V polarization unit vector
    Vec3 rx_h;                        // receiver H polarization unit vector
};

/// Complex sqrt-RCS per (frequency, polarization channel), units sqrt(m^2).
struct SweepResult {
    std::vector<double> frequencies;
    std::vector<complexd> values[kPolChannelCount];
    std::string solver;
    uint64_t seed = 0;
    uint64_t rays_launched = 0;
    uint64_t contributions = 0;
};

/// Streaming reduction: contributions are added one at a time; block
/// accumulators merge in fixed order so results are bitwise identical for
/// any worker count.
class SweepAccumulator {
public:
    explicit SweepAccumulator(const SweepGrid& grid);

    void add(const Contribution& c);
    void merge(const SweepAccumulator& other);

    /// Apply the j*k0/(2 sqrt(pi)) prefactor and return the finished sweep.
    SweepResult finalize() const;

    uint64_t count() const { return count_; }

private:
    const SweepGrid* grid_;
    bool uniform_;
    double f0_ = 0.0, df_ = 0.0;
    std::vector<complexd> sums_[kPolChannelCount];
    uint64_t count_ = 0;
};

/// Pure reduction over a contribution list (the solvers stream instead, with
/// identical arithmetic).
SweepResult evaluate_sweep(const std::vector<Contribution>& contributions,
                           const SweepGrid& grid);

}  // namespace mcsbr
