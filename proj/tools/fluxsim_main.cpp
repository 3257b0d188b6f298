#include "fluxsim/run.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"fluxsim - fluxonium processor design-verification toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    uint64_t seed = 1;
    int workers = 1;

    const std::vector<std::string> names = {"spectrum", "t1map", "dispersive", "gate1q", "couple",
                                            "cr",       "cz",    "yield",      "qec"};
    for (const auto& name : names) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key = value config file");
        sub->add_option("--seed", seed, "RNG seed");
        sub->add_option("--workers", workers, "worker thread count");
        sub->add_option("--out", out_dir, "output directory");
    }

    CLI11_PARSE(app, argc, argv);

    fluxsim::RunConfig cfg;
    cfg.subcommand = app.get_subcommands().front()->get_name();
    cfg.rng_seed = seed;
    cfg.worker_count = workers;
    cfg.output_path = out_dir;
    try {
        if (!config_path.empty()) cfg.params = fluxsim::parse_config_file(config_path);
        if (cfg.params.count("seed") && !app.get_subcommands().front()->count("--seed")) {
            cfg.rng_seed = std::stoull(cfg.params.at("seed"));
        }
        cfg.params.erase("seed");
        auto files = fluxsim::run(cfg);
        for (auto& f : files) std::cout << "wrote " << f << "\n";
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
