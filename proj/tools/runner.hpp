#pragma once

// Scenario runner behind the CLI: plain-text configs in, CSV/JSON files
// plus a run manifest out.  Kept apart from main() so the acceptance
// suite can drive the exact same code paths in-process.
//
// Config format: 'key = value' lines, '#' starts a comment.  Keys:
//
//   matrix       = 2 1 0 ; 1 2 1 ; 0 1 1     integer rows of the linear part
//   epsilon      = 0.05                      perturbation scale
//   mode         = k 0 1 0 sin 1 0 0         repeatable; groups k/cos/sin
//   family       = none | smooth | generic   built-in families (override map keys)
//   family_index = 0                         generic member index
//   family_eta   = 0.02                      smooth generator size
//   tag          = uu | wu | s
//   base         = 0.123 0.456 0.789
//   radius       = 0.1
//   stages, window, bases, n_min, n_max, grid, verify_grid, depth, samples
//   eps_schedule = 0.05 0.025 0.0125
//   tol          = 1e-9
//   seed         = 2026                      mandatory (here or --seed)
//   threads      = 0                         0 = all cores
//
// Every verb writes its data as CSV plus a structured summary.json and a
// manifest.json listing the outputs with a hash of the effective config.
// Data files are byte-deterministic in (config, seed, build); only the
// manifest carries timings.

#include <cstdint>
#include <string>
#include <vector>

#include "anosov/geometry.hpp"
#include "anosov/perturbation.hpp"

namespace lab {

struct ScenarioConfig {
    anosov::IntMat3 matrix;  // defaults to the reference automorphism
    double epsilon = 0.0;
    std::vector<anosov::FourierMode> modes;
    std::string family = "none";
    int family_index = 0;
    double family_eta = 0.02;

    std::string tag = "wu";
    anosov::Vec3 base{0.123, 0.456, 0.789};
    double radius = 0.1;
    int stages = 12;
    int window = 5;
    int bases = 4;
    int n_min = 2;
    int n_max = 7;
    std::vector<double> eps_schedule{0.05, 0.025, 0.0125};
    int grid = 16;
    int verify_grid = 24;
    double tol = 1e-9;
    int depth = 128;
    int samples = 8192;

    bool seed_set = false;
    std::uint64_t seed = 0;
    int threads = 0;
};

ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);

// Canonical serialization of the effective config; hashed into the
// manifest and stored beside the outputs for provenance.
std::string canonical_config(const ScenarioConfig& c);

struct RunResult {
    std::string summary;                // the JSON summary text
    std::vector<std::string> outputs;   // file names written into out_dir
};

// verb in {spectrum, growth, entropy, exponents, measure, conjugacy,
// rigidity}.  Creates out_dir if needed.  Throws anosov errors through.
RunResult run_verb(const std::string& verb, const ScenarioConfig& config,
                   const std::string& out_dir);

// Exit-code mapping for typed errors, shared by CLI and tests.
int exit_code_for(const std::exception& e);

}  // namespace lab
