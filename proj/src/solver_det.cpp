#include "mcsbr/solver_det.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "mcsbr/solver_mc.hpp"

namespace mcsbr {

void DetConfig::validate() const {
    if (!(rays_per_wavelength > 0.0))
        throw std::invalid_argument("det: rays_per_wavelength must be > 0");
    if (max_bounce < 1) throw std::invalid_argument("det: max_bounce must be >= 1");
    if (amplitude_cutoff < 0.0) throw std::invalid_argument("det: amplitude_cutoff must be >= 0");
    if (block_size < 1) throw std::invalid_argument("det: block_size must be >= 1");
}

namespace {

struct BlockResult {
    std::unique_ptr<SweepAccumulator> acc;
    RunStats stats;
    std::vector<Contribution> collected;
};

}  // namespace

DetResult solve(const Scene& scene, const Excitation& excitation,
                const std::vector<double>& frequencies, const DetConfig& config, int workers,
                std::vector<Contribution>* contributions_out) {
    config.validate();
    if (frequencies.empty()) throw std::invalid_argument("solve: empty frequency list");

    const auto t_start = std::chrono::steady_clock::now();

    double lambda_ref = config.reference_wavelength;
    if (lambda_ref <= 0.0) lambda_ref = kSpeedOfLight / frequencies.back();

    const LaunchRect rect = launch_rect(scene, excitation.k_inc, config.launch_padding);
    const StrataGrid grid = build_strata(rect, config.rays_per_wavelength, lambda_ref);
    const uint64_t total = static_cast<uint64_t>(grid.cell_count());

    SweepGrid sweep_grid{frequencies, excitation.k_scatter, excitation.rx_v, excitation.rx_h};
    const double ambient_n = scene.ambient_index();
    const ComplexVec3 e0_v(excitation.pol_v);
    const ComplexVec3 e0_h(excitation.pol_h);
    const double t_eps = scene.self_intersection_epsilon();
    const double cutoff = config.amplitude_cutoff;  // |E0| = 1 by construction

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
        stats.rays_launched = end - begin;

        uint64_t block_peak_stack = 0;   // sum over rays of per-ray peak stack bytes
        uint64_t block_forced = 0;       // sum over rays of all snapshot bytes pushed

        std::vector<PathState> stack;
        for (uint64_t cell = begin; cell < end; ++cell) {
            const StratumSample s =
                sample_stratum(grid, static_cast<uint32_t>(cell), 0, 0, /*jitter=*/false);
            PathState root = init_path(s.point, excitation.k_inc, e0_v, e0_h, ambient_n);
            root.stratum = static_cast<uint32_t>(cell);

            stack.clear();
            stack.push_back(root);
            size_t ray_peak_depth = 1;
            uint64_t ray_pushes = 1;
            uint32_t event_seq = 0;

            while (!stack.empty()) {
                PathState state = stack.back();
                stack.pop_back();

                const auto hit = scene.intersect(state.origin, state.dir,
                                                 state.bounce == 0 ? 0.0 : t_eps);
                if (!hit) continue;
                ++stats.segments_traced;
                advance(state, *hit);
                if (stats.rays_per_bounce.size() < static_cast<size_t>(state.bounce))
                    stats.rays_per_bounce.resize(state.bounce, 0);
                ++stats.rays_per_bounce[state.bounce - 1];

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
                    const uint64_t key =
                        static_cast<uint64_t>(state.stratum) << 24 | (event_seq++);
                    const Contribution c =
                        make_contribution(state, *hit, currents, grid.cell_area, key);
                    out.acc->add(c);
                    if (contributions_out) out.collected.push_back(c);
                    ++stats.contributions;
                }

                if (state.bounce >= config.max_bounce) {
                    ++stats.cap_kills;
                    continue;
                }

                // Push every surviving branch; depth-first, reflect explored
                // first (pushed last).
                for (int i = set.count - 1; i >= 0; --i) {
                    const BranchOutcome& o = set.outcomes[i];
                    if (cutoff > 0.0 &&
                        std::max(norm(o.new_e[0]), norm(o.new_e[1])) < cutoff)
                        continue;
                    PathState child = state;
                    child.dir = o.new_dir;
                    child.e[0] = o.new_e[0];
                    child.e[1] = o.new_e[1];
                    child.medium_n = o.new_n;
                    stack.push_back(child);
                    ++ray_pushes;
                }
                ray_peak_depth = std::max(ray_peak_depth, stack.size() + 1);
            }

            block_peak_stack += ray_peak_depth * sizeof(PathState);
            block_forced += ray_pushes * sizeof(PathState);
        }

        // GPU-style accounting: all rays of the block in flight at once, each
        // holding its peak stack (or, when forced, every snapshot it ever
        // allocated).
        stats.peak_live_state_bytes = block_peak_stack;
        stats.forced_stack_bytes = block_forced;
    });

    DetResult result;
    SweepAccumulator acc(sweep_grid);
    for (auto& b : blocks) {
        if (b.acc) acc.merge(*b.acc);
        result.stats.merge(b.stats);
        if (contributions_out)
            contributions_out->insert(contributions_out->end(), b.collected.begin(),
                                      b.collected.end());
    }
    result.sweep = acc.finalize();
    result.sweep.solver = "deterministic";
    result.sweep.rays_launched = result.stats.rays_launched;
    result.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
            .count();
    return result;
}

}  // namespace mcsbr
