#include <iostream>

#include <CLI11.hpp>

#include "mcsbr/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mcsbr - Monte Carlo shooting-and-bouncing-ray scattering solver"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    int workers = 0;
    int64_t seed = -1;

    const std::vector<std::string> commands = {"sweep",       "angle-sweep", "range-profile",
                                               "isar",        "convergence", "bench",
                                               "oracle",      "scenes"};
    std::string chosen;
    for (const std::string& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment configuration (JSON)");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--workers", workers, "worker threads (0 = all cores)");
        sub->add_option("--seed", seed, "override the config seed");
        sub->callback([&chosen, name] { chosen = name; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        mcsbr::ExperimentConfig cfg;
        if (!config_path.empty()) {
            cfg = mcsbr::parse_config_file(config_path);
        } else if (chosen != "scenes") {
            std::cerr << "mcsbr " << chosen << ": --config is required\n";
            return 2;
        }
        mcsbr::RunOptions opt;
        opt.out_dir = out_dir;
        opt.workers = workers;
        if (seed >= 0) opt.seed_override = static_cast<uint64_t>(seed);
        return mcsbr::run_command(chosen, cfg, opt);
    } catch (const std::exception& e) {
        std::cerr << "mcsbr " << chosen << ": " << e.what() << "\n";
        return 1;
    }
}
