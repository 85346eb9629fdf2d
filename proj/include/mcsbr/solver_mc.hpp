#pragma once
// Monte Carlo path-space SBR estimator: stratified launch over the incident
// aperture, one sampled branch per dielectric interaction (50/50 or
// Fresnel-weighted), optional Russian roulette, executed as a stack-free
// wavefront in fixed-size blocks.

#include <cstdint>

#include "mcsbr/rng.hpp"
#include "mcsbr/solver_common.hpp"

namespace mcsbr {

enum class BranchStrategy { kFiftyFifty, kFresnel };

struct RouletteConfig {
    bool enabled = false;
    double q = 0.5;       // kill probability per test
    int min_bounce = 2;   // tests start once bounce >= min_bounce
};

struct McConfig {
    double strata_per_wavelength = 10.0;
    int samples_per_stratum = 16;
    BranchStrategy branch_strategy = BranchStrategy::kFresnel;
    RouletteConfig roulette;
    int max_bounce = 9;
    uint64_t seed = 1;
    double reference_wavelength = 0.0;  // 0 = smallest wavelength in the sweep
    double launch_padding = 0.0;        // meters added per rect side
    double p_min = 0.05;                // Fresnel-sampling probability clamp
    bool jitter = true;                 // false pins samples at stratum centers
    int block_size = 8192;              // launch entries per wavefront block

    void validate() const;
};

struct StrataGrid {
    LaunchRect rect;
    int nu = 1, nv = 1;
    double cell_area = 0.0;
    double pdf_per_cell = 0.0;  // 1 / cell_area

    int cell_count() const { return nu * nv; }
};

/// Subdivide the launch rect so cell sides are at most
/// reference_wavelength / strata_per_wavelength.
StrataGrid build_strata(const LaunchRect& rect, double strata_per_wavelength,
                        double reference_wavelength);

/// Point uniform in the given cell, from the (seed, cell, sample) counter
/// stream; pdf is constant per cell. jitter=false returns the cell center.
struct StratumSample {
    Vec3 point;
    double pdf;
};
StratumSample sample_stratum(const StrataGrid& grid, uint32_t cell, uint32_t sample,
                             uint64_t seed, bool jitter);

/// Pick reflect/transmit among the physical outcomes. `u` is the uniform
/// draw; unused when only one outcome exists (probability 1).
struct BranchChoice {
    int index = 0;
    double prob = 1.0;
};
BranchChoice choose_branch(const BranchSet& set, BranchStrategy strategy, double p_min, double u);

/// Russian roulette: below min_bounce always continue; otherwise survive
/// with probability 1-q and absorb the 1/(1-q) weight.
bool roulette_step(PathState& state, const RouletteConfig& roulette, double u);

struct McResult {
    SweepResult sweep;
    RunStats stats;
};

/// Full estimator: trace once, evaluate every frequency. When
/// `contributions_out` is given, every emitted contribution is also
/// collected (block order, deterministic for any worker count).
McResult estimate(const Scene& scene, const Excitation& excitation,
                  const std::vector<double>& frequencies, const McConfig& config, int workers,
                  std::vector<Contribution>* contributions_out = nullptr);

}  // namespace mcsbr
