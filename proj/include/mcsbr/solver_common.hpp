#pragma once
// Shared solver machinery: source/receiver setup, instrumented run
// statistics, and the block scheduler that keeps results bitwise
// deterministic for any worker count.

#include <cstdint>
#include <functional>
#include <vector>

#include "mcsbr/farfield.hpp"

namespace mcsbr {

/// Incident wave and receiver description. Polarization vectors follow the
/// spherical basis of the source direction: V = theta_hat, H = phi_hat.
struct Excitation {
    Vec3 k_inc;        // unit propagation direction of the incident wave
    Vec3 pol_v, pol_h; // transmit polarization unit vectors
    Vec3 k_scatter;    // unit scattering direction toward the receiver
    Vec3 rx_v, rx_h;   // receiver polarization unit vectors
    bool occlusion_enabled = true;
};

/// Source arriving from spherical direction (theta, phi); monostatic
/// receiver (k_scatter = -k_inc) sharing the polarization basis.
Excitation monostatic_excitation(double theta_deg, double phi_deg);

/// Independent receive direction from its own spherical angles.
Excitation bistatic_excitation(double theta_deg, double phi_deg, double rx_theta_deg,
                               double rx_phi_deg);

/// Instrumented counters. Peak memory figures are the algorithmic live-state
/// quantities (not allocator or OS numbers): for the wavefront solver the
/// block's concurrent path states, for the stack solver the per-block sum of
/// ray stack peaks, with `forced_stack_bytes` charging every junction
/// snapshot even when a real implementation could elide the copy.
struct RunStats {
    std::vector<uint64_t> rays_per_bounce;       // rays traced per round, index 0 = round 1
    std::vector<uint64_t> roulette_candidates;
    std::vector<uint64_t> roulette_survivors;
    uint64_t rays_launched = 0;
    uint64_t segments_traced = 0;
    uint64_t contributions = 0;
    uint64_t grazing_kills = 0;
    uint64_t cap_kills = 0;
    uint64_t peak_live_state_bytes = 0;
    uint64_t forced_stack_bytes = 0;
    uint64_t state_bytes_per_ray = 0;
    uint64_t block_size = 0;
    double wall_ms = 0.0;

    void merge(const RunStats& other);
};

/// Run `body(block_index)` for blocks [0, block_count) on `workers` threads.
/// Each block is handled by exactly one worker; callers merge per-block
/// results in block order afterwards.
void run_blocks(uint64_t block_count, int workers, const std::function<void(uint64_t)>& body);

}  // namespace mcsbr
