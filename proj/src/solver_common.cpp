#include "mcsbr/solver_common.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace mcsbr {

namespace {

struct SphericalBasis {
    Vec3 r_hat, theta_hat, phi_hat;
};

SphericalBasis spherical(double theta_deg, double phi_deg) {
    const double th = theta_deg * kPi / 180.0;
    const double ph = phi_deg * kPi / 180.0;
    const double st = std::sin(th), ct = std::cos(th);
    const double sp = std::sin(ph), cp = std::cos(ph);
    SphericalBasis b;
    b.r_hat = {st * cp, st * sp, ct};
    b.theta_hat = {ct * cp, ct * sp, -st};
    b.phi_hat = {-sp, cp, 0.0};
    return b;
}

}  // namespace

Excitation monostatic_excitation(double theta_deg, double phi_deg) {
    const SphericalBasis b = spherical(theta_deg, phi_deg);
    Excitation e;
    e.k_inc = -b.r_hat;
    e.pol_v = b.theta_hat;
    e.pol_h = b.phi_hat;
    e.k_scatter = b.r_hat;
    e.rx_v = b.theta_hat;
    e.rx_h = b.phi_hat;
    return e;
}

Excitation bistatic_excitation(double theta_deg, double phi_deg, double rx_theta_deg,
                               double rx_phi_deg) {
    Excitation e = monostatic_excitation(theta_deg, phi_deg);
    const SphericalBasis rx = spherical(rx_theta_deg, rx_phi_deg);
    e.k_scatter = rx.r_hat;
    e.rx_v = rx.theta_hat;
    e.rx_h = rx.phi_hat;
    return e;
}

void RunStats::merge(const RunStats& other) {
    auto grow = [](std::vector<uint64_t>& a, const std::vector<uint64_t>& b) {
        if (b.size() > a.size()) a.resize(b.size(), 0);
        for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    };
    grow(rays_per_bounce, other.rays_per_bounce);
    grow(roulette_candidates, other.roulette_candidates);
    grow(roulette_survivors, other.roulette_survivors);
    rays_launched += other.rays_launched;
    segments_traced += other.segments_traced;
    contributions += other.contributions;
    grazing_kills += other.grazing_kills;
    cap_kills += other.cap_kills;
    peak_live_state_bytes = std::max(peak_live_state_bytes, other.peak_live_state_bytes);
    forced_stack_bytes = std::max(forced_stack_bytes, other.forced_stack_bytes);
    state_bytes_per_ray = std::max(state_bytes_per_ray, other.state_bytes_per_ray);
    block_size = std::max(block_size, other.block_size);
}

void run_blocks(uint64_t block_count, int workers, const std::function<void(uint64_t)>& body) {
    if (workers <= 1 || block_count <= 1) {
        for (uint64_t b = 0; b < block_count; ++b) body(b);
        return;
    }
    std::atomic<uint64_t> next{0};
    auto pump = [&] {
        for (;;) {
            const uint64_t b = next.fetch_add(1);
            if (b >= block_count) return;
            body(b);
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<uint64_t>(workers, block_count);
    pool.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n - 1; ++i) pool.emplace_back(pump);
    pump();
    for (auto& t : pool) t.join();
}

}  // namespace mcsbr
