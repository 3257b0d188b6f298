#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fluxsim {

// Resolved run configuration: one subcommand, a flat key=value parameter
// block (strictly validated), seed, output directory, worker count.
struct RunConfig {
    std::string subcommand;
    std::map<std::string, std::string> params;
    uint64_t rng_seed = 1;
    std::string output_path = ".";
    int worker_count = 1;
};

// Parses a flat key = value document ('#' starts a comment). Throws with the
// offending line on malformed input.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Executes the subcommand, writing CSV outputs plus a metadata sidecar into
// config.output_path. Returns the list of files written.
std::vector<std::string> run(const RunConfig& config);

}  // namespace fluxsim
