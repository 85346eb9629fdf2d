#pragma once
// Experiment configuration: structured JSON with explicit units in key
// names. Validation errors carry the offending field path.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcsbr/oracles.hpp"
#include "mcsbr/signal_processing.hpp"
#include "mcsbr/solver_det.hpp"
#include "mcsbr/solver_mc.hpp"

namespace mcsbr {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SceneConfig {
    std::string mesh_path;          // file pair, or
    std::string material_map_path;
    std::string builtin;            // builtin name with params
    std::map<std::string, double> builtin_params;
};

struct SourceConfig {
    double theta_deg = 0.0;
    double phi_deg = 0.0;
};

struct ReceiverConfig {
    bool monostatic = true;
    double theta_deg = 0.0;  // used when not monostatic
    double phi_deg = 0.0;
    bool occlusion = true;
};

struct FrequencyConfig {
    double start_hz = 1e9;
    double stop_hz = 3e9;
    int count = 101;

    std::vector<double> grid() const;
};

enum class SolverKind { kMc, kDeterministic };

struct AngleSweepConfig {
    double theta_start_deg = 0.0;
    double theta_stop_deg = 90.0;
    int count = 91;
    double phi_deg = 0.0;
};

struct ProfileConfig {
    Window window = Window::kHann;
    int zero_pad = 4;
};

struct IsarConfig {
    double theta_deg = 60.0;          // polar angle of the look direction
    double azimuth_start_deg = 80.0;
    double azimuth_stop_deg = 100.0;
    int angle_count = 51;
    Window window = Window::kHann;
    int zero_pad = 4;
    double dynamic_floor_db = -40.0;
};

struct ConvergenceConfig {
    std::vector<double> densities{2.5, 5.0, 10.0};
    std::vector<int> samples_per_stratum{1};
    int seed_count = 10;
    double reference_rays_per_wavelength = 40.0;
};

struct BenchConfig {
    int repeats = 3;
    int warmups = 1;
};

struct OracleConfig {
    std::string kind = "slab";  // slab | plate | sphere
    oracles::LayerStack stack;
    bool pec_backed = false;
    double plate_a_m = 1.0, plate_b_m = 1.0;
    double sphere_radius_m = 1.0;
};

struct ExperimentConfig {
    SceneConfig scene;
    SourceConfig source;
    ReceiverConfig receiver;
    FrequencyConfig frequency;
    SolverKind solver = SolverKind::kMc;
    McConfig mc;
    DetConfig det;
    AngleSweepConfig angle_sweep;
    ProfileConfig profile;
    IsarConfig isar;
    ConvergenceConfig convergence;
    BenchConfig bench;
    OracleConfig oracle;

    std::string config_hash;  // hash of the parsed JSON document

    Scene load() const;
    Excitation excitation() const;
};

/// Parse + validate. Unknown top-level keys are rejected to catch typos.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig parse_config_file(const std::string& path);

/// FNV-1a hex digest of the canonical JSON dump.
std::string hash_text(const std::string& text);

}  // namespace mcsbr
