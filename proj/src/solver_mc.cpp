#include "mcsbr/solver_mc.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace mcsbr {

void McConfig::validate() const {
    if (!(strata_per_wavelength > 0.0)) throw std::invalid_argument("mc: strata_per_wavelength must be > 0");
    if (samples_per_stratum < 1) throw std::invalid_argument("mc: samples_per_stratum must be >= 1");
    if (!(roulette.q > 0.0 && roulette.q < 1.0)) throw std::invalid_argument("mc: roulette q must be in (0,1)");
    if (roulette.min_bounce < 1) throw std::invalid_argument("mc: roulette min_bounce must be >= 1");
    if (max_bounce < 2) throw std::invalid_argument("mc: max_bounce must be >= 2");
    if (block_size < 1) throw std::invalid_argument("mc: block_size must be >= 1");
}

StrataGrid build_strata(const LaunchRect& rect, double strata_per_wavelength,
                        double reference_wavelength) {
    if (!(reference_wavelength > 0.0))
        throw std::invalid_argument("build_strata: reference wavelength must be > 0");
    const double target = reference_wavelength / strata_per_wavelength;
    StrataGrid grid;
    grid.rect = rect;
    grid.nu = std::max(1, static_cast<int>(std::ceil(2.0 * rect.half_u / target)));
    grid.nv = std::max(1, static_cast<int>(std::ceil(2.0 * rect.half_v / target)));
    grid.cell_area = rect.area() / (static_cast<double>(grid.nu) * grid.nv);
    grid.pdf_per_cell = 1.0 / grid.cell_area;
    return grid;
}

StratumSample sample_stratum(const StrataGrid& grid, uint32_t cell, uint32_t sample,
                             uint64_t seed, bool jitter) {
    const uint32_t i = cell % static_cast<uint32_t>(grid.nu);
    const uint32_t j = cell / static_cast<uint32_t>(grid.nu);
    const double ju = jitter ? counter_uniform(seed, cell, sample, 0, RngPurpose::kLaunchU) : 0.5;
    const double jv = jitter ? counter_uniform(seed, cell, sample, 0, RngPurpose::kLaunchV) : 0.5;
    const double su = -1.0 + 2.0 * (i + ju) / grid.nu;
    const double sv = -1.0 + 2.0 * (j + jv) / grid.nv;
    return {grid.rect.point_at(su, sv), grid.pdf_per_cell};
}

BranchChoice choose_branch(const BranchSet& set, BranchStrategy strategy, double p_min,
                           double u) {
    if (set.count == 1) return {0, 1.0};
    double p_reflect = 0.5;
    if (strategy == BranchStrategy::kFresnel) {
        const double r_bar = 0.5 * (std::abs(set.coeffs.r_s) + std::abs(set.coeffs.r_p));
        p_reflect = std::min(std::max(r_bar, p_min), 1.0 - p_min);
    }
    if (u < p_reflect) return {0, p_reflect};
    return {1, 1.0 - p_reflect};
}

bool roulette_step(PathState& state, const RouletteConfig& roulette, double u) {
    if (state.bounce < roulette.min_bounce) return true;
    if (u > roulette.q) {
        state.weight /= (1.0 - roulette.q);
        return true;
    }
    state.alive = false;
    return false;
}

namespace {

struct BlockResult {
    std::unique_ptr<SweepAccumulator> acc;
    RunStats stats;
    std::vector<Contribution> collected;
};

}  // namespace

McResult estimate(const Scene& scene, const Excitation& excitation,
                  const std::vector<double>& frequencies, const McConfig& config, int workers,
                  std::vector<Contribution>* contributions_out) {
    config.validate();
    if (frequencies.empty()) throw std::invalid_argument("estimate: empty frequency list");

    const auto t_start = std::chrono::steady_clock::now();

    double lambda_ref = config.reference_wavelength;
    if (lambda_ref <= 0.0) lambda_ref = kSpeedOfLight / frequencies.back();

    const LaunchRect rect = launch_rect(scene, excitation.k_inc, config.launch_padding);
    const StrataGrid grid = build_strata(rect, config.strata_per_wavelength, lambda_ref);

    const uint64_t spp = static_cast<uint64_t>(config.samples_per_stratum);
    const uint64_t total = static_cast<uint64_t>(grid.cell_count()) * spp;
    if (total == 0) throw std::invalid_argument("estimate: empty strata grid");

    SweepGrid sweep_grid{frequencies, excitation.k_scatter, excitation.rx_v, excitation.rx_h};
    const double area_weight = grid.cell_area / static_cast<double>(spp);
    const double ambient_n = scene.ambient_index();
    const ComplexVec3 e0_v(excitation.pol_v);
    const ComplexVec3 e0_h(excitation.pol_h);
    const double t_eps = scene.self_intersection_epsilon();

    const uint64_t block_size = static_cast<uint64_t>(config.block_size);
    const uint64_t block_count = (total + block_size - 1) / block_size;
    std::vector<BlockResult> blocks(block_count);

    run_blocks(block_count, workers, [&](uint64_t block) {
        const uint64_t begin = block * block_size;
        const uint64_t end = std::min(total, begin + block_size);

        BlockResult& out = blocks[block];
        out.acc = std::make_unique<SweepAccumulator>(sweep_grid);
        RunStats& stats = out.stats;
        stats.block_size = block_size;
        stats.state_bytes_per_ray = sizeof(PathState);

        std::vector<PathState> live;
        live.reserve(end - begin);
        for (uint64_t entry = begin; entry < end; ++entry) {
            const uint32_t cell = static_cast<uint32_t>(entry / spp);
            const uint32_t sample = static_cast<uint32_t>(entry % spp);
            const StratumSample s = sample_stratum(grid, cell, sample, config.seed, config.jitter);
            PathState state = init_path(s.point, excitation.k_inc, e0_v, e0_h, ambient_n);
            state.stratum = cell;
            state.sample = sample;
            live.push_back(state);
        }
        stats.rays_launched = live.size();
        stats.peak_live_state_bytes = live.size() * sizeof(PathState);

        std::vector<PathState> next;
        next.reserve(live.size());

        int round = 0;
        while (!live.empty()) {
            ++round;
            if (stats.rays_per_bounce.size() < static_cast<size_t>(round))
                stats.rays_per_bounce.resize(round, 0);
            stats.rays_per_bounce[round - 1] += live.size();
            stats.segments_traced += live.size();

            next.clear();
            for (PathState& state : live) {
                const auto hit = scene.intersect(state.origin, state.dir,
                                                 state.bounce == 0 ? 0.0 : t_eps);
                if (!hit) continue;  // escaped the scene
                advance(state, *hit);

                const BranchSet set = branch_outcomes(state, *hit);
                if (set.grazing) {
                    ++stats.grazing_kills;
                    continue;
                }

                const ScatterCase sc = hit->far_side_pec ? ScatterCase::kPec
                                       : hit->near_is_ambient ? ScatterCase::kEntering
                                                              : ScatterCase::kExiting;
                const bool dark_exit =
                    sc == ScatterCase::kExiting && set.coeffs.total_internal_reflection;
                if (!dark_exit &&
                    chi_visibility(scene, hit->point, hit->exterior_facing, excitation.k_scatter,
                                   excitation.occlusion_enabled)) {
                    SurfaceCurrents currents[2] = {
                        meca_currents(*hit, state.e[0], state.dir, sc, set.coeffs, set.basis,
                                      state.medium_n),
                        meca_currents(*hit, state.e[1], state.dir, sc, set.coeffs, set.basis,
                                      state.medium_n)};
                    const uint64_t key = (static_cast<uint64_t>(state.stratum) * spp +
                                          state.sample) << 8 |
                                         static_cast<uint64_t>(state.bounce & 0xff);
                    const Contribution c =
                        make_contribution(state, *hit, currents, area_weight, key);
                    out.acc->add(c);
                    if (contributions_out) out.collected.push_back(c);
                    ++stats.contributions;
                }

                if (state.bounce >= config.max_bounce) {
                    ++stats.cap_kills;
                    continue;
                }

                const double u_branch = counter_uniform(config.seed, state.stratum, state.sample,
                                                        state.bounce, RngPurpose::kBranch);
                const BranchChoice choice =
                    choose_branch(set, config.branch_strategy, config.p_min, u_branch);
                const BranchOutcome& picked = set.outcomes[choice.index];
                state.dir = picked.new_dir;
                state.e[0] = picked.new_e[0];
                state.e[1] = picked.new_e[1];
                state.medium_n = picked.new_n;
                state.prob *= choice.prob;

                if (config.roulette.enabled) {
                    if (state.bounce >= config.roulette.min_bounce) {
                        if (stats.roulette_candidates.size() < static_cast<size_t>(state.bounce))
                            stats.roulette_candidates.resize(state.bounce, 0);
                        if (stats.roulette_survivors.size() < static_cast<size_t>(state.bounce))
                            stats.roulette_survivors.resize(state.bounce, 0);
                        ++stats.roulette_candidates[state.bounce - 1];
                        const double u_r = counter_uniform(config.seed, state.stratum,
                                                           state.sample, state.bounce,
                                                           RngPurpose::kRoulette);
                        if (!roulette_step(state, config.roulette, u_r)) continue;
                        ++stats.roulette_survivors[state.bounce - 1];
                    }
                }
                next.push_back(state);
            }
            live.swap(next);
        }
    });

    McResult result;
    SweepAccumulator acc(sweep_grid);
    for (auto& b : blocks) {
        if (b.acc) acc.merge(*b.acc);
        result.stats.merge(b.stats);
        if (contributions_out)
            contributions_out->insert(contributions_out->end(), b.collected.begin(),
                                      b.collected.end());
    }
    result.sweep = acc.finalize();
    result.sweep.solver = "mc";
    result.sweep.seed = config.seed;
    result.sweep.rays_launched = result.stats.rays_launched;
    result.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
            .count();
    return result;
}

}  // namespace mcsbr
