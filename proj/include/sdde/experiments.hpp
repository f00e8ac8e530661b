#pragma once

// Subcommand orchestration: runs one diagnostic for a parsed configuration,
// writes its CSV artifacts and returns the JSON-lines summary records.

#include <string>
#include <vector>

#include "sdde/config.hpp"
#include "sdde/rng.hpp"

namespace sdde {

struct RunResult {
    bool pass = false;
    std::vector<std::string> records;    // one JSON object per line
    std::vector<std::string> artifacts;  // paths written
};

const std::vector<std::string>& subcommands();
bool is_subcommand(const std::string& name);

// Throws ConfigError for invalid combinations; other failures are reported in the records.
RunResult run_experiment(const std::string& subcommand, const ExperimentConfig& cfg, const std::string& out_dir);

// Random history direction (u = a + b theta per mode) on the first `modes` modes.
InitialHistory random_direction(const SpectralBasis& basis, Rng& rng, std::size_t modes = 8);

// Trace CSV (`t,tau_1..tau_m,E,calE,normM,u_<k>,v_<k>...`) and the snapshot text block.
void write_trace_csv(const std::string& path, const Model& model, const Trace& trace,
                     const std::vector<std::size_t>& modes);
void write_snapshots(const std::string& path, const Model& model, const Trace& trace, std::size_t every);

// Largest energy-norm distance between two traces at their common stored times.
double max_state_gap(const SpectralBasis& basis, const Trace& coarse, const Trace& fine);

}  // namespace sdde
