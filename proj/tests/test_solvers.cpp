#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "mcsbr/oracles.hpp"
#include "mcsbr/scenes.hpp"
#include "mcsbr/solver_det.hpp"
#include "mcsbr/solver_mc.hpp"
#include "test_util.hpp"

using namespace mcsbr;
using mcsbr::test::db20;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<size_t>(i)] = n == 1 ? a : a + i * (b - a) / (n - 1);
    return v;
}

// Glass cube with its front face at z = 0 so solver phases line up with the
// slab oracle's front-interface reference.
Scene front_aligned_glass_cube(double size, bool pec_backed) {
    return make_builtin_scene(pec_backed ? "glass_cube_pec_bottom" : "glass_cube",
                              {{"size_m", size}, {"center_z_m", -0.5 * size}});
}

// Oracle prediction for the cube sweep: plate factor times the slab
// reflection coefficient, referenced to the front face at z = 0.
complexd cube_prediction(double frequency, double face_area, double slab_index,
                         double thickness, bool pec_backed, int max_bounce = -1) {
    oracles::LayerStack stack;
    stack.layers.push_back({slab_index, thickness});
    complexd r;
    if (max_bounce < 0) {
        r = oracles::slab_reflection(stack, frequency, pec_backed);
    } else {
        const double k0 = 2.0 * kPi * frequency / kSpeedOfLight;
        for (const auto& term : oracles::enumerate_layered_paths(stack, pec_backed, max_bounce))
            r += term.amplitude * std::polar(1.0, -k0 * term.optical_length);
    }
    const double k0 = 2.0 * kPi * frequency / kSpeedOfLight;
    return complexd{0.0, 1.0} * k0 * face_area * r / std::sqrt(kPi);
}

}  // namespace

TEST_CASE("build_strata arithmetic") {
    LaunchRect rect;
    rect.u_axis = {1, 0, 0};
    rect.v_axis = {0, 1, 0};
    rect.half_u = 0.5;
    rect.half_v = 0.5;
    const StrataGrid g = build_strata(rect, 10.0, 0.1);
    CHECK(g.nu == 100);
    CHECK(g.nv == 100);
    CHECK(g.cell_area == doctest::Approx(1e-4));
    // pdf normalization: sum over cells of cell_area * pdf = cell count
    CHECK(g.cell_count() * g.cell_area * g.pdf_per_cell == doctest::Approx(g.cell_count()));
    // nu * nv * cell_area = rect area
    CHECK(g.cell_count() * g.cell_area == doctest::Approx(rect.area()).epsilon(1e-9));
}

TEST_CASE("sample_stratum stays in cell and averages to the centroid") {
    LaunchRect rect;
    rect.u_axis = {1, 0, 0};
    rect.v_axis = {0, 1, 0};
    rect.half_u = 0.5;
    rect.half_v = 0.5;
    const StrataGrid g = build_strata(rect, 10.0, 1.0);  // 10 x 10 cells
    const uint32_t cell = 3 * 10 + 7;

    Vec3 mean{0, 0, 0};
    const int n = 10000;
    for (int s = 0; s < n; ++s) {
        const auto smp = sample_stratum(g, cell, static_cast<uint32_t>(s), 42, true);
        CHECK(smp.pdf == doctest::Approx(g.pdf_per_cell));
        const double u = dot(smp.point - rect.center, rect.u_axis);
        const double v = dot(smp.point - rect.center, rect.v_axis);
        CHECK(u >= -0.5 + 0.7 * 0.1 - 1e-12);
        CHECK(u <= -0.5 + 0.8 * 0.1 + 1e-12);
        CHECK(v >= -0.5 + 0.3 * 0.1 - 1e-12);
        CHECK(v <= -0.5 + 0.4 * 0.1 + 1e-12);
        mean += smp.point;
    }
    mean *= 1.0 / n;
    // CLT bound: 3 sigma with sigma = side / sqrt(12) / sqrt(n)
    const double tol = 3.0 * 0.1 / std::sqrt(12.0) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(dot(mean - rect.center, rect.u_axis) - (-0.5 + 0.75 * 0.1)) < tol);
    CHECK(std::abs(dot(mean - rect.center, rect.v_axis) - (-0.5 + 0.35 * 0.1)) < tol);

    // counter streams: same key gives the same point, regardless of caller
    const auto a = sample_stratum(g, 5, 9, 1234, true);
    const auto b = sample_stratum(g, 5, 9, 1234, true);
    CHECK(a.point.x == b.point.x);
    CHECK(a.point.y == b.point.y);
}

TEST_CASE("choose_branch probabilities") {
    PathState s = init_path({0, 0, 1}, {0, 0, -1}, ComplexVec3{1, 0, 0}, ComplexVec3{0, 1, 0},
                            1.0);
    Hit glass;
    glass.t = 1;
    glass.point = {0, 0, 0};
    glass.normal = {0, 0, 1};
    glass.n_incident = 1.0;
    glass.n_transmit = 1.5;
    const BranchSet two = branch_outcomes(s, glass);
    REQUIRE(two.count == 2);

    // Fresnel importance: P(reflect) = (|r_s|+|r_p|)/2 = 0.2 at air->glass
    CHECK(choose_branch(two, BranchStrategy::kFresnel, 0.05, 0.1).prob == doctest::Approx(0.2));
    CHECK(choose_branch(two, BranchStrategy::kFresnel, 0.05, 0.1).index == 0);
    CHECK(choose_branch(two, BranchStrategy::kFresnel, 0.05, 0.3).index == 1);
    CHECK(choose_branch(two, BranchStrategy::kFresnel, 0.05, 0.3).prob == doctest::Approx(0.8));
    // clamp keeps probabilities away from 0/1
    BranchSet matched = two;
    matched.coeffs.r_s = matched.coeffs.r_p = 0.0;
    CHECK(choose_branch(matched, BranchStrategy::kFresnel, 0.05, 0.01).prob ==
          doctest::Approx(0.05));
    // fifty-fifty
    CHECK(choose_branch(two, BranchStrategy::kFiftyFifty, 0.05, 0.49).prob == doctest::Approx(0.5));

    // PEC and TIR: single outcome with probability 1
    Hit pec = glass;
    pec.far_side_pec = true;
    pec.n_transmit = 0.0;
    const BranchSet one = branch_outcomes(s, pec);
    CHECK(one.count == 1);
    CHECK(choose_branch(one, BranchStrategy::kFresnel, 0.05, 0.99).prob == 1.0);
}

TEST_CASE("roulette_step statistics and weights") {
    RouletteConfig r;
    r.enabled = true;
    r.q = 0.5;
    r.min_bounce = 2;

    PathState young;
    young.bounce = 1;
    CHECK(roulette_step(young, r, 0.0));  // below min_bounce: deterministic continue
    CHECK(young.weight == 1.0);

    PathState s;
    s.bounce = 3;
    CHECK(roulette_step(s, r, 0.9));
    CHECK(s.weight == doctest::Approx(2.0));  // q = 0.5 survivor doubles

    int survived = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        PathState t;
        t.bounce = 5;
        const double u = counter_uniform(7, static_cast<uint64_t>(i), 0, 5,
                                         RngPurpose::kRoulette);
        if (roulette_step(t, r, u)) ++survived;
    }
    // binomial 3 sigma around n/2
    const double sigma = std::sqrt(0.25 * n);
    CHECK(std::abs(survived - n / 2) < 3.0 * sigma);
}

TEST_CASE("deterministic solver reproduces the slab series on the glass cube") {
    const Scene scene = front_aligned_glass_cube(3.0, false);
    const Excitation exc = monostatic_excitation(0.0, 0.0);
    const std::vector<double> freqs = linspace(1.01e9, 2.93e9, 9);

    DetConfig cfg;
    cfg.rays_per_wavelength = 8.0;
    const DetResult r = solve(scene, exc, freqs, cfg, 2);

    for (size_t k = 0; k < freqs.size(); ++k) {
        // compare against the bounce-truncated series (exact expectation)
        const complexd want = cube_prediction(freqs[k], 9.0, 1.5, 3.0, false, cfg.max_bounce);
        const complexd got = r.sweep.values[kVV][k];
        CHECK(std::abs(got - want) < 1e-9 * std::abs(want));
        // and against the infinite-series oracle within the truncation tail
        const complexd full = cube_prediction(freqs[k], 9.0, 1.5, 3.0, false);
        CHECK(std::abs(got - full) < 3e-5 * std::abs(full));
        // VV and HH agree by symmetry at normal incidence
        CHECK(std::abs(r.sweep.values[kHH][k] - got) < 1e-9 * std::abs(got));
    }
}

TEST_CASE("deterministic solver reproduces the pec-backed slab series") {
    const Scene scene = front_aligned_glass_cube(3.0, true);
    const Excitation exc = monostatic_excitation(0.0, 0.0);
    const std::vector<double> freqs = linspace(1.07e9, 2.87e9, 7);

    DetConfig cfg;
    cfg.rays_per_wavelength = 8.0;
    const DetResult r = solve(scene, exc, freqs, cfg, 2);
    for (size_t k = 0; k < freqs.size(); ++k) {
        const complexd want = cube_prediction(freqs[k], 9.0, 1.5, 3.0, true, cfg.max_bounce);
        CHECK(std::abs(r.sweep.values[kVV][k] - want) < 1e-9 * std::abs(want));
    }
}

TEST_CASE("deterministic branch tree equals the layered-path enumeration") {
    const Scene scene = front_aligned_glass_cube(2.0, false);
    const Excitation exc = monostatic_excitation(0.0, 0.0);
    const std::vector<double> freqs{2e9};

    DetConfig cfg;
    cfg.rays_per_wavelength = 4.0;
    std::vector<Contribution> contributions;
    const DetResult r = solve(scene, exc, freqs, cfg, 2, &contributions);
    (void)r;

    // group contributions by bounce; each group's summed receiver amplitude
    // equals 2 * A * (oracle amplitude), optical lengths match exactly
    std::map<int, complexd> amp_by_bounce;
    std::map<int, double> s_by_bounce;
    const Vec3 ks = exc.k_scatter;
    for (const Contribution& c : contributions) {
        const ComplexVec3 f = cross(ks, cross(ks, c.a_j[0])) + cross(ks, c.a_m[0]);
        amp_by_bounce[c.bounce] += dot(f, exc.rx_v);
        s_by_bounce[c.bounce] = c.phi_total - dot(ks, c.exit_point);
    }

    oracles::LayerStack stack;
    stack.layers.push_back({1.5, 2.0});
    const auto terms = oracles::enumerate_layered_paths(stack, false, cfg.max_bounce);
    REQUIRE(terms.size() == amp_by_bounce.size());
    for (const auto& term : terms) {
        REQUIRE(amp_by_bounce.count(term.bounce));
        const complexd got = amp_by_bounce[term.bounce] / (2.0 * 4.0);  // face area 4
        CHECK(std::abs(got - term.amplitude) < 1e-9);
        CHECK(std::abs(s_by_bounce[term.bounce] - term.optical_length) < 1e-9);
    }
}

TEST_CASE("center-sampled MC equals deterministic on a pure-PEC scene bit for bit") {
    const Scene scene = make_builtin_scene("dihedral");
    const Excitation exc = monostatic_excitation(45.0, 0.0);
    const std::vector<double> freqs{3e9};

    DetConfig det;
    det.rays_per_wavelength = 6.0;
    std::vector<Contribution> det_contribs;
    solve(scene, exc, freqs, det, 2, &det_contribs);

    McConfig mc;
    mc.strata_per_wavelength = 6.0;
    mc.samples_per_stratum = 1;
    mc.jitter = false;
    std::vector<Contribution> mc_contribs;
    estimate(scene, exc, freqs, mc, 2, &mc_contribs);

    REQUIRE(!det_contribs.empty());
    REQUIRE(det_contribs.size() == mc_contribs.size());

    auto order = [](const Contribution& a, const Contribution& b) {
        if (a.bounce != b.bounce) return a.bounce < b.bounce;
        if (a.exit_point.x != b.exit_point.x) return a.exit_point.x < b.exit_point.x;
        if (a.exit_point.y != b.exit_point.y) return a.exit_point.y < b.exit_point.y;
        return a.exit_point.z < b.exit_point.z;
    };
    std::sort(det_contribs.begin(), det_contribs.end(), order);
    std::sort(mc_contribs.begin(), mc_contribs.end(), order);
    for (size_t i = 0; i < det_contribs.size(); ++i) {
        CHECK(det_contribs[i].phi_total == mc_contribs[i].phi_total);
        CHECK(det_contribs[i].exit_point.z == mc_contribs[i].exit_point.z);
        for (int pol = 0; pol < 2; ++pol) {
            CHECK(det_contribs[i].a_j[pol].x == mc_contribs[i].a_j[pol].x);
            CHECK(det_contribs[i].a_j[pol].y == mc_contribs[i].a_j[pol].y);
            CHECK(det_contribs[i].a_m[pol].z == mc_contribs[i].a_m[pol].z);
        }
    }
}

TEST_CASE("MC estimator converges to the slab oracle") {
    const Scene scene = front_aligned_glass_cube(1.0, false);
    const Excitation exc = monostatic_excitation(0.0, 0.0);
    const std::vector<double> freqs = linspace(1.03e9, 2.91e9, 11);

    McConfig cfg;
    cfg.strata_per_wavelength = 10.0;
    cfg.samples_per_stratum = 4;
    cfg.branch_strategy = BranchStrategy::kFiftyFifty;
    cfg.seed = 11;
    const McResult r = estimate(scene, exc, freqs, cfg, 2);

    double mean_abs_db = 0.0;
    for (size_t k = 0; k < freqs.size(); ++k) {
        const complexd want = cube_prediction(freqs[k], 1.0, 1.5, 1.0, false);
        mean_abs_db += std::abs(db20(std::abs(r.sweep.values[kVV][k])) - db20(std::abs(want)));
    }
    mean_abs_db /= static_cast<double>(freqs.size());
    CHECK(mean_abs_db < 0.1);
}

TEST_CASE("MC plate estimate lands within 1 dB of the PO closed form") {
    const Scene scene = make_builtin_scene("plate");
    const Excitation exc = monostatic_excitation(0.0, 0.0);
    const double lambda = 0.1;
    const std::vector<double> freqs{kSpeedOfLight / lambda};

    McConfig cfg;
    cfg.strata_per_wavelength = 10.0;
    cfg.samples_per_stratum = 4;
    cfg.seed = 5;
    const McResult r = estimate(scene, exc, freqs, cfg, 2);
    const double sigma = std::norm(r.sweep.values[kVV][0]);
    CHECK(std::abs(db20(std::sqrt(sigma)) - db20(std::sqrt(oracles::plate_rcs(1, 1, lambda)))) <
          0.5);  // amplitude dB; well inside the 1 dB power gate
    // max_bounce = 1 on a plate means only first arrivals contribute
    McConfig one = cfg;
    one.max_bounce = 2;
    const McResult r2 = estimate(scene, exc, freqs, one, 2);
    CHECK(r2.stats.contributions == r2.stats.rays_launched);
}

TEST_CASE("seed determinism across worker counts") {
    const Scene scene = front_aligned_glass_cube(1.0, false);
    const Excitation exc = monostatic_excitation(20.0, 40.0);
    const std::vector<double> freqs = linspace(1e9, 3e9, 5);

    McConfig cfg;
    cfg.strata_per_wavelength = 6.0;
    cfg.samples_per_stratum = 2;
    cfg.seed = 99;
    const McResult r1 = estimate(scene, exc, freqs, cfg, 1);
    const McResult r2 = estimate(scene, exc, freqs, cfg, 2);
    const McResult r4 = estimate(scene, exc, freqs, cfg, 4);
    for (int ch = 0; ch < kPolChannelCount; ++ch) {
        for (size_t k = 0; k < freqs.size(); ++k) {
            CHECK(r1.sweep.values[ch][k].real() == r2.sweep.values[ch][k].real());
            CHECK(r1.sweep.values[ch][k].imag() == r2.sweep.values[ch][k].imag());
            CHECK(r1.sweep.values[ch][k].real() == r4.sweep.values[ch][k].real());
            CHECK(r1.sweep.values[ch][k].imag() == r4.sweep.values[ch][k].imag());
        }
    }
    // a different seed moves the estimate
    McConfig other = cfg;
    other.seed = 100;
    const McResult r5 = estimate(scene, exc, freqs, other, 2);
    CHECK(r5.sweep.values[kVV][0] != r1.sweep.values[kVV][0]);
}

TEST_CASE("doubling samples halves the variance") {
    const Scene scene = front_aligned_glass_cube(1.0, false);
    const Excitation exc = monostatic_excitation(0.0, 0.0);
    const std::vector<double> freqs{2.05e9};

    auto ensemble_variance = [&](int spp, int seeds) {
        double mean_re = 0.0, mean_im = 0.0;
        std::vector<complexd> values;
        for (int s = 0; s < seeds; ++s) {
            McConfig cfg;
            cfg.strata_per_wavelength = 4.0;
            cfg.samples_per_stratum = spp;
            cfg.branch_strategy = BranchStrategy::kFiftyFifty;
            cfg.seed = 1000 + static_cast<uint64_t>(s);
            const McResult r = estimate(scene, exc, freqs, cfg, 2);
            values.push_back(r.sweep.values[kVV][0]);
            mean_re += values.back().real();
            mean_im += values.back().imag();
        }
        mean_re /= seeds;
        mean_im /= seeds;
        double var = 0.0;
        for (const complexd v : values)
            var += std::norm(v - complexd{mean_re, mean_im});
        return var / (seeds - 1);
    };

    const int seeds = 600;
    const double v1 = ensemble_variance(1, seeds);
    const double v2 = ensemble_variance(2, seeds);
    CHECK(v1 / v2 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("sampling strategies and roulette are unbiased against each other") {
    const Scene scene = front_aligned_glass_cube(1.0, false);
    const Excitation exc = monostatic_excitation(0.0, 0.0);
    const std::vector<double> freqs{1.51e9, 2.47e9};
    const int seeds = 120;

    struct Batch {
        complexd mean[2];
        double se[2];
    };
    auto run_batch = [&](BranchStrategy strategy, bool roulette) {
        std::vector<complexd> vals[2];
        for (int s = 0; s < seeds; ++s) {
            McConfig cfg;
            cfg.strata_per_wavelength = 5.0;
            cfg.samples_per_stratum = 1;
            cfg.branch_strategy = strategy;
            cfg.roulette.enabled = roulette;
            cfg.roulette.min_bounce = 2;
            cfg.seed = 7000 + static_cast<uint64_t>(s);
            const McResult r = estimate(scene, exc, freqs, cfg, 2);
            for (int k = 0; k < 2; ++k) vals[k].push_back(r.sweep.values[kVV][k]);
        }
        Batch b;
        for (int k = 0; k < 2; ++k) {
            complexd m{0, 0};
            for (const complexd v : vals[k]) m += v;
            m /= static_cast<double>(seeds);
            double var = 0.0;
            for (const complexd v : vals[k]) var += std::norm(v - m);
            var /= (seeds - 1);
            b.mean[k] = m;
            b.se[k] = std::sqrt(var / seeds);
        }
        return b;
    };

    const Batch batches[4] = {run_batch(BranchStrategy::kFiftyFifty, false),
                              run_batch(BranchStrategy::kFresnel, false),
                              run_batch(BranchStrategy::kFiftyFifty, true),
                              run_batch(BranchStrategy::kFresnel, true)};
    for (int a = 0; a < 4; ++a) {
        for (int b = a + 1; b < 4; ++b) {
            for (int k = 0; k < 2; ++k) {
                const double se =
                    std::sqrt(batches[a].se[k] * batches[a].se[k] +
                              batches[b].se[k] * batches[b].se[k]);
                CHECK(std::abs(batches[a].mean[k] - batches[b].mean[k]) < 3.0 * se);
            }
        }
    }
}

TEST_CASE("wavefront memory is flat in max_bounce") {
    const Scene scene = make_builtin_scene("nested", {{"subdivisions", 2.0}});
    const Excitation exc = monostatic_excitation(0.0, 0.0);
    const std::vector<double> freqs{3e9};

    auto peak = [&](int max_bounce) {
        McConfig cfg;
        cfg.strata_per_wavelength = 3.0;
        cfg.samples_per_stratum = 1;
        cfg.max_bounce = max_bounce;
        cfg.seed = 3;
        return estimate(scene, exc, freqs, cfg, 2).stats.peak_live_state_bytes;
    };
    const auto p3 = peak(3);
    const auto p9 = peak(9);
    CHECK(std::abs(static_cast<double>(p9) - static_cast<double>(p3)) <
          0.05 * static_cast<double>(p3));

    // the deterministic stack, by contrast, grows with depth
    auto det_forced = [&](int max_bounce) {
        DetConfig cfg;
        cfg.rays_per_wavelength = 3.0;
        cfg.max_bounce = max_bounce;
        cfg.force_stack_accounting = true;
        return solve(scene, exc, freqs, cfg, 2).stats.forced_stack_bytes;
    };
    CHECK(det_forced(9) > det_forced(3));
}
