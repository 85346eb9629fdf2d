#pragma once
// Command implementations behind the CLI. Every command writes its artifacts
// under an output directory plus a manifest with the config hash and seed;
// the CSV artifacts are byte-reproducible for a given (config, seed) at any
// worker count.

#include <string>

#include "mcsbr/config.hpp"

namespace mcsbr {

struct RunOptions {
    int workers = 0;          // 0 = hardware concurrency
    std::string out_dir = "out";
    std::optional<uint64_t> seed_override;
};

int run_command(const std::string& command, const ExperimentConfig& config,
                const RunOptions& options);

/// Shared helpers (also used by tests).
SweepResult run_solver(const Scene& scene, const Excitation& excitation,
                       const std::vector<double>& frequencies, const ExperimentConfig& config,
                       int workers, RunStats* stats_out = nullptr);

std::string sweep_csv(const SweepResult& sweep, const std::string& config_hash);
std::string stats_json(const RunStats& stats, const std::string& solver);

}  // namespace mcsbr
