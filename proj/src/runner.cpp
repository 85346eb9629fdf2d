#include "mcsbr/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <json.hpp>

#include "mcsbr/oracles.hpp"
#include "mcsbr/scenes.hpp"

namespace mcsbr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double db20(double mag) { return 20.0 * std::log10(std::max(mag, 1e-300)); }

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

int effective_workers(const RunOptions& options) {
    if (options.workers > 0) return options.workers;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

struct ArtifactLog {
    std::vector<std::string> paths;
    void add(const fs::path& p) { paths.push_back(p.string()); }
};

void write_manifest(const fs::path& dir, const std::string& command,
                    const ExperimentConfig& cfg, uint64_t seed, int workers,
                    const ArtifactLog& artifacts, const RunStats* stats,
                    const std::string& solver) {
    json m;
    m["command"] = command;
    m["config_hash"] = cfg.config_hash;
    m["seed"] = seed;
    m["workers"] = workers;
    m["version"] = "0.1.0";
    m["artifacts"] = artifacts.paths;
    if (stats) {
        m["solver"] = solver;
        m["wall_ms"] = stats->wall_ms;
        m["rays_launched"] = stats->rays_launched;
        m["contributions"] = stats->contributions;
    }
    write_file(dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace

SweepResult run_solver(const Scene& scene, const Excitation& excitation,
                       const std::vector<double>& frequencies, const ExperimentConfig& config,
                       int workers, RunStats* stats_out) {
    if (config.solver == SolverKind::kMc) {
        McResult r = estimate(scene, excitation, frequencies, config.mc, workers);
        if (stats_out) *stats_out = r.stats;
        return r.sweep;
    }
    DetResult r = solve(scene, excitation, frequencies, config.det, workers);
    if (stats_out) *stats_out = r.stats;
    return r.sweep;
}

std::string sweep_csv(const SweepResult& sweep, const std::string& config_hash) {
    std::string out;
    out += "# mcsbr sweep\n";
    out += "# config_hash=" + config_hash + "\n";
    out += "# seed=" + std::to_string(sweep.seed) + "\n";
    out += "# solver=" + sweep.solver + "\n";
    out += "frequency_hz,re_vv,im_vv,re_hh,im_hh,re_vh,im_vh,re_hv,im_hv\n";
    for (size_t i = 0; i < sweep.frequencies.size(); ++i) {
        out += fmt(sweep.frequencies[i]);
        for (const int ch : {kVV, kHH, kVH, kHV}) {
            out += "," + fmt(sweep.values[ch][i].real());
            out += "," + fmt(sweep.values[ch][i].imag());
        }
        out += "\n";
    }
    return out;
}

std::string stats_json(const RunStats& stats, const std::string& solver) {
    json s;
    s["solver"] = solver;
    s["rays_launched"] = stats.rays_launched;
    s["segments_traced"] = stats.segments_traced;
    s["rays_per_bounce"] = stats.rays_per_bounce;
    s["roulette_candidates"] = stats.roulette_candidates;
    s["roulette_survivors"] = stats.roulette_survivors;
    s["contributions"] = stats.contributions;
    s["grazing_kills"] = stats.grazing_kills;
    s["cap_kills"] = stats.cap_kills;
    s["peak_live_state_bytes"] = stats.peak_live_state_bytes;
    s["forced_stack_bytes"] = stats.forced_stack_bytes;
    s["state_bytes_per_ray"] = stats.state_bytes_per_ray;
    s["block_size"] = stats.block_size;
    s["wall_ms"] = stats.wall_ms;
    return s.dump(2) + "\n";
}

namespace {

int cmd_sweep(const ExperimentConfig& cfg, const RunOptions& opt, bool with_profile) {
    const Scene scene = cfg.load();
    const Excitation exc = cfg.excitation();
    const int workers = effective_workers(opt);

    RunStats stats;
    const SweepResult sweep = run_solver(scene, exc, cfg.frequency.grid(), cfg, workers, &stats);

    fs::create_directories(opt.out_dir);
    ArtifactLog log;
    const fs::path dir(opt.out_dir);
    write_file(dir / "sweep.csv", sweep_csv(sweep, cfg.config_hash));
    log.add(dir / "sweep.csv");
    write_file(dir / "stats.json", stats_json(stats, sweep.solver));
    log.add(dir / "stats.json");

    if (with_profile) {
        const RangeProfile p =
            range_profile(sweep, kVV, cfg.profile.window, cfg.profile.zero_pad);
        std::string out;
        out += "# mcsbr range-profile\n";
        out += "# config_hash=" + cfg.config_hash + "\n";
        out += "# channel=vv window=" +
               std::string(p.window == Window::kHann ? "hann" : "none") +
               " zero_pad=" + std::to_string(p.zero_pad) + "\n";
        out += "range_m,mag_db\n";
        for (size_t i = 0; i < p.range_m.size(); ++i)
            out += fmt(p.range_m[i]) + "," + fmt(p.mag_db[i]) + "\n";
        write_file(dir / "profile.csv", out);
        log.add(dir / "profile.csv");
    }

    write_manifest(dir, with_profile ? "range-profile" : "sweep", cfg, cfg.mc.seed, workers,
                   log, &stats, sweep.solver);
    return 0;
}

int cmd_angle_sweep(const ExperimentConfig& cfg, const RunOptions& opt) {
    const Scene scene = cfg.load();
    const int workers = effective_workers(opt);
    const std::vector<double> freqs = cfg.frequency.grid();

    std::string out;
    out += "# mcsbr angle-sweep\n";
    out += "# config_hash=" + cfg.config_hash + "\n";
    out += "# seed=" + std::to_string(cfg.mc.seed) + "\n";
    out += "theta_deg,frequency_hz,re_vv,im_vv,re_hh,im_hh,re_vh,im_vh,re_hv,im_hv\n";

    const AngleSweepConfig& a = cfg.angle_sweep;
    for (int i = 0; i < a.count; ++i) {
        const double theta = a.count == 1 ? a.theta_start_deg
                                          : a.theta_start_deg +
                                                i * (a.theta_stop_deg - a.theta_start_deg) /
                                                    (a.count - 1);
        Excitation exc = monostatic_excitation(theta, a.phi_deg);
        exc.occlusion_enabled = cfg.receiver.occlusion;
        const SweepResult sweep = run_solver(scene, exc, freqs, cfg, workers);
        for (size_t k = 0; k < freqs.size(); ++k) {
            out += fmt(theta) + "," + fmt(freqs[k]);
            for (const int ch : {kVV, kHH, kVH, kHV}) {
                out += "," + fmt(sweep.values[ch][k].real());
                out += "," + fmt(sweep.values[ch][k].imag());
            }
            out += "\n";
        }
    }

    fs::create_directories(opt.out_dir);
    ArtifactLog log;
    const fs::path dir(opt.out_dir);
    write_file(dir / "angle_sweep.csv", out);
    log.add(dir / "angle_sweep.csv");
    write_manifest(dir, "angle-sweep", cfg, cfg.mc.seed, workers, log, nullptr, "");
    return 0;
}

std::string isar_grid_csv(const IsarImage& img, const std::string& config_hash) {
    std::string out;
    out += "# mcsbr isar\n";
    out += "# config_hash=" + config_hash + "\n";
    out += "# peak_db=" + fmt(img.peak_db) + " floor_db=" + fmt(img.dynamic_floor_db) + "\n";
    out += "# columns: down_range_m then mag_db per cross-range bin\n";
    out += "# cross_range_m";
    for (const double c : img.cross_range_m) out += "," + fmt(c);
    out += "\n";
    for (size_t r = 0; r < img.down_range_m.size(); ++r) {
        out += fmt(img.down_range_m[r]);
        for (size_t c = 0; c < img.cross_range_m.size(); ++c) out += "," + fmt(img.at(r, c));
        out += "\n";
    }
    return out;
}

std::string isar_pgm(const IsarImage& img) {
    const size_t rows = img.down_range_m.size();
    const size_t cols = img.cross_range_m.size();
    const double lo = img.peak_db + img.dynamic_floor_db;
    const double hi = img.peak_db;
    std::string out;
    out += "P5\n";
    out += "# db_window=[" + fmt(lo) + "," + fmt(hi) + "]\n";
    out += "# down_range_extent_m=" +
           fmt(img.down_range_m.back() - img.down_range_m.front()) + "\n";
    out += "# cross_range_extent_m=" +
           fmt(img.cross_range_m.back() - img.cross_range_m.front()) + "\n";
    out += std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
    out.reserve(out.size() + rows * cols);
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < cols; ++c) {
            const double v = (img.at(rows - 1 - r, c) - lo) / (hi - lo);
            out.push_back(static_cast<char>(
                static_cast<unsigned char>(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5)));
        }
    }
    return out;
}

int cmd_isar(const ExperimentConfig& cfg, const RunOptions& opt) {
    const Scene scene = cfg.load();
    const int workers = effective_workers(opt);
    const std::vector<double> freqs = cfg.frequency.grid();
    const IsarConfig& ic = cfg.isar;

    std::vector<SweepResult> sweeps;
    std::vector<double> angles;
    for (int i = 0; i < ic.angle_count; ++i) {
        const double az = ic.azimuth_start_deg +
                          i * (ic.azimuth_stop_deg - ic.azimuth_start_deg) /
                              (ic.angle_count - 1);
        angles.push_back(az);
        Excitation exc = monostatic_excitation(ic.theta_deg, az);
        exc.occlusion_enabled = cfg.receiver.occlusion;
        sweeps.push_back(run_solver(scene, exc, freqs, cfg, workers));
    }

    const IsarImage img =
        isar(sweeps, angles, kVV, ic.window, ic.zero_pad, ic.dynamic_floor_db);

    fs::create_directories(opt.out_dir);
    ArtifactLog log;
    const fs::path dir(opt.out_dir);
    write_file(dir / "isar.csv", isar_grid_csv(img, cfg.config_hash));
    log.add(dir / "isar.csv");
    write_file(dir / "isar.pgm", isar_pgm(img));
    log.add(dir / "isar.pgm");
    write_manifest(dir, "isar", cfg, cfg.mc.seed, workers, log, nullptr, "");
    return 0;
}

int cmd_convergence(const ExperimentConfig& cfg, const RunOptions& opt) {
    const Scene scene = cfg.load();
    const Excitation exc = cfg.excitation();
    const int workers = effective_workers(opt);
    const std::vector<double> freqs = cfg.frequency.grid();

    DetConfig ref_cfg = cfg.det;
    ref_cfg.rays_per_wavelength = cfg.convergence.reference_rays_per_wavelength;
    const SweepResult ref = solve(scene, exc, freqs, ref_cfg, workers).sweep;

    std::string out;
    out += "# mcsbr convergence\n";
    out += "# config_hash=" + cfg.config_hash + "\n";
    out += "# reference=deterministic rays_per_wavelength=" +
           fmt(ref_cfg.rays_per_wavelength) + "\n";
    out += "# error metric: mean over frequencies of squared dB(vv) difference\n";
    out += "density,samples_per_stratum,effective_rays_per_wavelength,seed,mse_db,mean_abs_db\n";

    for (const double density : cfg.convergence.densities) {
        for (const int spp : cfg.convergence.samples_per_stratum) {
            for (int s = 0; s < cfg.convergence.seed_count; ++s) {
                McConfig mc = cfg.mc;
                mc.strata_per_wavelength = density;
                mc.samples_per_stratum = spp;
                mc.seed = cfg.mc.seed + static_cast<uint64_t>(s);
                const SweepResult sweep = estimate(scene, exc, freqs, mc, workers).sweep;
                double mse = 0.0, mad = 0.0;
                for (size_t k = 0; k < freqs.size(); ++k) {
                    const double d = db20(std::abs(sweep.values[kVV][k])) -
                                     db20(std::abs(ref.values[kVV][k]));
                    mse += d * d;
                    mad += std::abs(d);
                }
                mse /= static_cast<double>(freqs.size());
                mad /= static_cast<double>(freqs.size());
                out += fmt(density) + "," + std::to_string(spp) + "," +
                       fmt(density * std::sqrt(static_cast<double>(spp))) + "," +
                       std::to_string(mc.seed) + "," + fmt(mse) + "," + fmt(mad) + "\n";
            }
        }
    }

    fs::create_directories(opt.out_dir);
    ArtifactLog log;
    const fs::path dir(opt.out_dir);
    write_file(dir / "convergence.csv", out);
    log.add(dir / "convergence.csv");
    write_manifest(dir, "convergence", cfg, cfg.mc.seed, workers, log, nullptr, "");
    return 0;
}

int cmd_bench(const ExperimentConfig& cfg, const RunOptions& opt) {
    const Scene scene = cfg.load();
    const Excitation exc = cfg.excitation();
    const int workers = effective_workers(opt);
    const std::vector<double> freqs = cfg.frequency.grid();

    struct Row {
        std::string solver;
        double mean_s = 0.0, std_s = 0.0;
        RunStats stats;
    };
    std::vector<Row> rows;

    auto bench_one = [&](const std::string& name, auto&& run) {
        for (int w = 0; w < cfg.bench.warmups; ++w) run();
        std::vector<double> wall;
        Row row;
        row.solver = name;
        for (int r = 0; r < cfg.bench.repeats; ++r) {
            RunStats stats = run();
            wall.push_back(stats.wall_ms / 1000.0);
            row.stats = stats;
        }
        for (const double w : wall) row.mean_s += w;
        row.mean_s /= wall.size();
        for (const double w : wall) row.std_s += (w - row.mean_s) * (w - row.mean_s);
        row.std_s = wall.size() > 1 ? std::sqrt(row.std_s / (wall.size() - 1)) : 0.0;
        rows.push_back(row);
    };

    McConfig mc = cfg.mc;
    DetConfig det = cfg.det;
    det.force_stack_accounting = true;
    bench_one("mc", [&] { return estimate(scene, exc, freqs, mc, workers).stats; });
    bench_one("deterministic", [&] { return solve(scene, exc, freqs, det, workers).stats; });

    std::string out;
    out += "# mcsbr bench\n";
    out += "# config_hash=" + cfg.config_hash + "\n";
    out += "# repeats=" + std::to_string(cfg.bench.repeats) +
           " warmups=" + std::to_string(cfg.bench.warmups) + "\n";
    out += "solver,wall_s_mean,wall_s_std,peak_state_mib,forced_stack_mib,rays_launched,"
           "segments_traced,contributions\n";
    for (const Row& row : rows) {
        out += row.solver + "," + fmt(row.mean_s) + "," + fmt(row.std_s) + "," +
               fmt(row.stats.peak_live_state_bytes / (1024.0 * 1024.0)) + "," +
               fmt(row.stats.forced_stack_bytes / (1024.0 * 1024.0)) + "," +
               std::to_string(row.stats.rays_launched) + "," +
               std::to_string(row.stats.segments_traced) + "," +
               std::to_string(row.stats.contributions) + "\n";
    }

    fs::create_directories(opt.out_dir);
    ArtifactLog log;
    const fs::path dir(opt.out_dir);
    write_file(dir / "bench.csv", out);
    log.add(dir / "bench.csv");
    write_manifest(dir, "bench", cfg, cfg.mc.seed, workers, log, nullptr, "");
    return 0;
}

int cmd_oracle(const ExperimentConfig& cfg, const RunOptions& opt) {
    const std::vector<double> freqs = cfg.frequency.grid();
    const OracleConfig& oc = cfg.oracle;

    std::string out;
    out += "# mcsbr oracle kind=" + oc.kind + "\n";
    out += "# config_hash=" + cfg.config_hash + "\n";
    if (oc.kind == "slab") {
        out += "frequency_hz,re_r,im_r,mag_r\n";
        for (const double f : freqs) {
            const auto r = oracles::slab_reflection(oc.stack, f, oc.pec_backed);
            out += fmt(f) + "," + fmt(r.real()) + "," + fmt(r.imag()) + "," +
                   fmt(std::abs(r)) + "\n";
        }
    } else if (oc.kind == "plate") {
        out += "frequency_hz,sigma_m2\n";
        for (const double f : freqs)
            out += fmt(f) + "," + fmt(oracles::plate_rcs(oc.plate_a_m, oc.plate_b_m,
                                                         kSpeedOfLight / f)) + "\n";
    } else {
        out += "frequency_hz,sigma_m2\n";
        for (const double f : freqs)
            out += fmt(f) + "," + fmt(oracles::sphere_go_rcs(oc.sphere_radius_m)) + "\n";
    }

    fs::create_directories(opt.out_dir);
    ArtifactLog log;
    const fs::path dir(opt.out_dir);
    write_file(dir / "oracle.csv", out);
    log.add(dir / "oracle.csv");
    write_manifest(dir, "oracle", cfg, cfg.mc.seed, 1, log, nullptr, "");
    return 0;
}

int cmd_scenes(const ExperimentConfig& cfg, const RunOptions& opt) {
    fs::create_directories(opt.out_dir);
    ArtifactLog log;
    if (!cfg.scene.builtin.empty()) {
        const auto [mesh, map] =
            write_builtin_scene(cfg.scene.builtin, cfg.scene.builtin_params, opt.out_dir);
        log.add(mesh);
        log.add(map);
    } else {
        for (const std::string& name : builtin_scene_names()) {
            const auto [mesh, map] = write_builtin_scene(name, {}, opt.out_dir);
            log.add(mesh);
            log.add(map);
        }
    }
    write_manifest(opt.out_dir, "scenes", cfg, 0, 1, log, nullptr, "");
    return 0;
}

}  // namespace

int run_command(const std::string& command, const ExperimentConfig& config,
                const RunOptions& options) {
    ExperimentConfig cfg = config;
    if (options.seed_override) cfg.mc.seed = *options.seed_override;

    if (command == "sweep") return cmd_sweep(cfg, options, false);
    if (command == "range-profile") return cmd_sweep(cfg, options, true);
    if (command == "angle-sweep") return cmd_angle_sweep(cfg, options);
    if (command == "isar") return cmd_isar(cfg, options);
    if (command == "convergence") return cmd_convergence(cfg, options);
    if (command == "bench") return cmd_bench(cfg, options);
    if (command == "oracle") return cmd_oracle(cfg, options);
    if (command == "scenes") return cmd_scenes(cfg, options);
    std::cerr << "unknown command: " << command << "\n";
    return 2;
}

}  // namespace mcsbr
