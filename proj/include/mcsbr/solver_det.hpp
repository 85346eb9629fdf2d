#pragma once
// Baseline deterministic SBR: dense midpoint-rule launch grid, exhaustive
// depth-first exploration of every reflect/transmit branch with an explicit
// snapshot stack, instrumented for peak stack bytes.

#include <cstdint>

#include "mcsbr/solver_common.hpp"

namespace mcsbr {

struct DetConfig {
    double rays_per_wavelength = 20.0;
    int max_bounce = 9;
    double amplitude_cutoff = 0.0;  // kill branches below cutoff * |E0|; 0 disables
    bool force_stack_accounting = false;  // charge every junction snapshot
    double launch_padding = 0.0;
    double reference_wavelength = 0.0;  // 0 = smallest wavelength in the sweep
    int block_size = 8192;              // launch cells per block

    void validate() const;
};

struct DetResult {
    SweepResult sweep;
    RunStats stats;
};

DetResult solve(const Scene& scene, const Excitation& excitation,
                const std::vector<double>& frequencies, const DetConfig& config, int workers,
                std::vector<Contribution>* contributions_out = nullptr);

}  // namespace mcsbr
