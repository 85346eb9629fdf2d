#include "mcsbr/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mcsbr/scenes.hpp"

namespace mcsbr {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

double number(const json& j, const std::string& path, const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number()) fail(path + "." + key, "expected a number");
    return j[key].get<double>();
}

int integer(const json& j, const std::string& path, const char* key, int dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number_integer()) fail(path + "." + key, "expected an integer");
    return j[key].get<int>();
}

bool boolean(const json& j, const std::string& path, const char* key, bool dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_boolean()) fail(path + "." + key, "expected true/false");
    return j[key].get<bool>();
}

std::string text(const json& j, const std::string& path, const char* key,
                 const std::string& dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_string()) fail(path + "." + key, "expected a string");
    return j[key].get<std::string>();
}

Window parse_window(const std::string& s, const std::string& path) {
    if (s == "none") return Window::kNone;
    if (s == "hann") return Window::kHann;
    fail(path, "unknown window '" + s + "' (expected none|hann)");
}

}  // namespace

std::vector<double> FrequencyConfig::grid() const {
    std::vector<double> f(static_cast<size_t>(count));
    if (count == 1) {
        f[0] = start_hz;
        return f;
    }
    const double step = (stop_hz - start_hz) / (count - 1);
    for (int i = 0; i < count; ++i) f[static_cast<size_t>(i)] = start_hz + i * step;
    return f;
}

Scene ExperimentConfig::load() const {
    if (!scene.builtin.empty()) return make_builtin_scene(scene.builtin, scene.builtin_params);
    return load_scene_files(scene.mesh_path, scene.material_map_path);
}

Excitation ExperimentConfig::excitation() const {
    Excitation e = receiver.monostatic
                       ? monostatic_excitation(source.theta_deg, source.phi_deg)
                       : bistatic_excitation(source.theta_deg, source.phi_deg,
                                             receiver.theta_deg, receiver.phi_deg);
    e.occlusion_enabled = receiver.occlusion;
    return e;
}

std::string hash_text(const std::string& text) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");

    static const std::vector<std::string> known = {
        "scene",   "source",      "receiver", "frequency", "solver", "angle_sweep",
        "profile", "isar",        "convergence", "bench",  "oracle", "seed"};
    for (const auto& [key, _] : doc.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            fail(key, "unknown configuration section");
    }

    ExperimentConfig cfg;
    cfg.config_hash = hash_text(doc.dump());

    if (doc.contains("scene")) {
        const json& s = doc["scene"];
        cfg.scene.builtin = text(s, "scene", "builtin", "");
        cfg.scene.mesh_path = text(s, "scene", "mesh", "");
        cfg.scene.material_map_path = text(s, "scene", "materials", "");
        if (s.contains("params")) {
            for (const auto& [k, v] : s["params"].items()) {
                if (!v.is_number()) fail("scene.params." + k, "expected a number");
                cfg.scene.builtin_params[k] = v.get<double>();
            }
        }
        if (cfg.scene.builtin.empty() && cfg.scene.mesh_path.empty())
            fail("scene", "needs either 'builtin' or 'mesh' + 'materials'");
        if (!cfg.scene.mesh_path.empty() && cfg.scene.material_map_path.empty())
            fail("scene.materials", "required when 'mesh' is given");
        if (!cfg.scene.mesh_path.empty()) {
            for (const auto& p : {cfg.scene.mesh_path, cfg.scene.material_map_path}) {
                if (!std::ifstream(p).good()) fail("scene", "referenced file not found: " + p);
            }
        }
    }

    if (doc.contains("source")) {
        const json& s = doc["source"];
        cfg.source.theta_deg = number(s, "source", "theta_deg", 0.0);
        cfg.source.phi_deg = number(s, "source", "phi_deg", 0.0);
        if (cfg.source.theta_deg < 0.0 || cfg.source.theta_deg > 180.0)
            fail("source.theta_deg", "must lie in [0, 180]");
    }

    if (doc.contains("receiver")) {
        const json& r = doc["receiver"];
        cfg.receiver.monostatic = boolean(r, "receiver", "monostatic", true);
        cfg.receiver.theta_deg = number(r, "receiver", "theta_deg", 0.0);
        cfg.receiver.phi_deg = number(r, "receiver", "phi_deg", 0.0);
        cfg.receiver.occlusion = boolean(r, "receiver", "occlusion", true);
    }

    if (doc.contains("frequency")) {
        const json& f = doc["frequency"];
        cfg.frequency.start_hz = number(f, "frequency", "start_hz", 1e9);
        cfg.frequency.stop_hz = number(f, "frequency", "stop_hz", 3e9);
        cfg.frequency.count = integer(f, "frequency", "count", 101);
        if (cfg.frequency.count < 1) fail("frequency.count", "must be >= 1");
        if (!(cfg.frequency.start_hz > 0.0)) fail("frequency.start_hz", "must be > 0");
        if (cfg.frequency.count > 1 && !(cfg.frequency.stop_hz > cfg.frequency.start_hz))
            fail("frequency.stop_hz", "must exceed start_hz");
    }

    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        const std::string type = text(s, "solver", "type", "mc");
        if (type == "mc")
            cfg.solver = SolverKind::kMc;
        else if (type == "deterministic")
            cfg.solver = SolverKind::kDeterministic;
        else
            fail("solver.type", "expected mc|deterministic");

        if (s.contains("mc")) {
            const json& m = s["mc"];
            McConfig& mc = cfg.mc;
            mc.strata_per_wavelength =
                number(m, "solver.mc", "strata_per_wavelength", mc.strata_per_wavelength);
            mc.samples_per_stratum =
                integer(m, "solver.mc", "samples_per_stratum", mc.samples_per_stratum);
            const std::string strat =
                text(m, "solver.mc", "branch_strategy", "fresnel");
            if (strat == "fresnel")
                mc.branch_strategy = BranchStrategy::kFresnel;
            else if (strat == "fifty_fifty")
                mc.branch_strategy = BranchStrategy::kFiftyFifty;
            else
                fail("solver.mc.branch_strategy", "expected fresnel|fifty_fifty");
            if (m.contains("roulette")) {
                const json& r = m["roulette"];
                mc.roulette.enabled = boolean(r, "solver.mc.roulette", "enabled", false);
                mc.roulette.q = number(r, "solver.mc.roulette", "q", 0.5);
                mc.roulette.min_bounce = integer(r, "solver.mc.roulette", "min_bounce", 2);
            }
            mc.max_bounce = integer(m, "solver.mc", "max_bounce", mc.max_bounce);
            mc.launch_padding = number(m, "solver.mc", "launch_padding_m", 0.0);
            mc.p_min = number(m, "solver.mc", "p_min", mc.p_min);
            try {
                mc.validate();
            } catch (const std::exception& e) {
                fail("solver.mc", e.what());
            }
        }
        if (s.contains("deterministic")) {
            const json& d = s["deterministic"];
            DetConfig& det = cfg.det;
            det.rays_per_wavelength =
                number(d, "solver.deterministic", "rays_per_wavelength", det.rays_per_wavelength);
            det.max_bounce = integer(d, "solver.deterministic", "max_bounce", det.max_bounce);
            det.amplitude_cutoff =
                number(d, "solver.deterministic", "amplitude_cutoff", det.amplitude_cutoff);
            det.force_stack_accounting =
                boolean(d, "solver.deterministic", "force_stack_accounting", false);
            det.launch_padding = number(d, "solver.deterministic", "launch_padding_m", 0.0);
            try {
                det.validate();
            } catch (const std::exception& e) {
                fail("solver.deterministic", e.what());
            }
        }
    }

    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer()) fail("seed", "expected an integer");
        cfg.mc.seed = doc["seed"].get<uint64_t>();
    }

    if (doc.contains("angle_sweep")) {
        const json& a = doc["angle_sweep"];
        cfg.angle_sweep.theta_start_deg = number(a, "angle_sweep", "theta_start_deg", 0.0);
        cfg.angle_sweep.theta_stop_deg = number(a, "angle_sweep", "theta_stop_deg", 90.0);
        cfg.angle_sweep.count = integer(a, "angle_sweep", "count", 91);
        cfg.angle_sweep.phi_deg = number(a, "angle_sweep", "phi_deg", 0.0);
        if (cfg.angle_sweep.count < 1) fail("angle_sweep.count", "must be >= 1");
    }

    if (doc.contains("profile")) {
        const json& p = doc["profile"];
        cfg.profile.window = parse_window(text(p, "profile", "window", "hann"), "profile.window");
        cfg.profile.zero_pad = integer(p, "profile", "zero_pad", 4);
        if (cfg.profile.zero_pad < 1) fail("profile.zero_pad", "must be >= 1");
    }

    if (doc.contains("isar")) {
        const json& i = doc["isar"];
        cfg.isar.theta_deg = number(i, "isar", "theta_deg", 60.0);
        cfg.isar.azimuth_start_deg = number(i, "isar", "azimuth_start_deg", 80.0);
        cfg.isar.azimuth_stop_deg = number(i, "isar", "azimuth_stop_deg", 100.0);
        cfg.isar.angle_count = integer(i, "isar", "angle_count", 51);
        cfg.isar.window = parse_window(text(i, "isar", "window", "hann"), "isar.window");
        cfg.isar.zero_pad = integer(i, "isar", "zero_pad", 4);
        cfg.isar.dynamic_floor_db = number(i, "isar", "dynamic_floor_db", -40.0);
        if (cfg.isar.angle_count < 2) fail("isar.angle_count", "must be >= 2");
        if (std::abs(cfg.isar.azimuth_stop_deg - cfg.isar.azimuth_start_deg) > 30.0)
            fail("isar", "aperture exceeds the 30 degree small-angle limit");
    }

    if (doc.contains("convergence")) {
        const json& c = doc["convergence"];
        if (c.contains("densities")) {
            cfg.convergence.densities.clear();
            for (const auto& v : c["densities"]) {
                if (!v.is_number() || !(v.get<double>() > 0.0))
                    fail("convergence.densities", "entries must be positive numbers");
                cfg.convergence.densities.push_back(v.get<double>());
            }
        }
        if (c.contains("samples_per_stratum")) {
            cfg.convergence.samples_per_stratum.clear();
            for (const auto& v : c["samples_per_stratum"]) {
                if (!v.is_number_integer() || v.get<int>() < 1)
                    fail("convergence.samples_per_stratum", "entries must be integers >= 1");
                cfg.convergence.samples_per_stratum.push_back(v.get<int>());
            }
        }
        cfg.convergence.seed_count = integer(c, "convergence", "seed_count", 10);
        cfg.convergence.reference_rays_per_wavelength =
            number(c, "convergence", "reference_rays_per_wavelength", 40.0);
        if (cfg.convergence.seed_count < 1) fail("convergence.seed_count", "must be >= 1");
    }

    if (doc.contains("bench")) {
        const json& b = doc["bench"];
        cfg.bench.repeats = integer(b, "bench", "repeats", 3);
        cfg.bench.warmups = integer(b, "bench", "warmups", 1);
        if (cfg.bench.repeats < 1) fail("bench.repeats", "must be >= 1");
    }

    if (doc.contains("oracle")) {
        const json& o = doc["oracle"];
        cfg.oracle.kind = text(o, "oracle", "kind", "slab");
        if (cfg.oracle.kind != "slab" && cfg.oracle.kind != "plate" && cfg.oracle.kind != "sphere")
            fail("oracle.kind", "expected slab|plate|sphere");
        cfg.oracle.pec_backed = boolean(o, "oracle", "pec_backed", false);
        cfg.oracle.plate_a_m = number(o, "oracle", "plate_a_m", 1.0);
        cfg.oracle.plate_b_m = number(o, "oracle", "plate_b_m", 1.0);
        cfg.oracle.sphere_radius_m = number(o, "oracle", "sphere_radius_m", 1.0);
        if (o.contains("layers")) {
            for (const auto& layer : o["layers"]) {
                const double n = number(layer, "oracle.layers[]", "index", 1.5);
                const double d = number(layer, "oracle.layers[]", "thickness_m", 1.0);
                if (!(n > 0.0) || !(d > 0.0))
                    fail("oracle.layers", "index and thickness_m must be > 0");
                cfg.oracle.stack.layers.push_back({n, d});
            }
        }
    }

    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace mcsbr
