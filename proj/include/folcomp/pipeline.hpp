#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "folcomp/foliation.hpp"
#include "folcomp/graph_transform.hpp"
#include "folcomp/io.hpp"
#include "folcomp/jet_transform.hpp"
#include "folcomp/map_model.hpp"
#include "folcomp/norms.hpp"

namespace folcomp {

inline constexpr const char* kVersion = "1.0.0";

struct RunConfig {
    MapSpec map;
    bool has_map = false;
    int M = 200;
    double p = 2.0;
    int x_resolution = 41;
    double tol = 1e-10;
    int max_iter = 10000;
    int jet_order = -1; // -1: use the map's k
    JetMode jet_mode = JetMode::automatic;
    std::string directory = "folcomp_out";
    std::vector<std::string> formats{"csv", "json", "svg"};
    std::uint64_t seed = 1;
    NormKind norm = NormKind::spectral;
    FactorialReading reading = FactorialReading::twice_factorial;
    /// Leaf base points (x_1..x_n, y); empty: defaults at x = 0.
    std::vector<std::vector<double>> leaf_bases;
    double leaf_step = kLeafStep;
    double transversal_x = 0.0;
    int samples_per_side = 81;
    /// Largest |y| sampled on the transversal. Near |y| = 1 images sit on the
    /// boundary of D and slides can leave it.
    double reduce_y_max = 0.95;
    int contraction_trials = 50;

    bool wants(const std::string& format) const;
    Grid grid() const;
};

/// Parses a config document. `base_dir` resolves a map given as a relative
/// path. Unknown keys and out-of-range values raise ConfigError; map
/// problems raise SpecInvalid.
RunConfig parse_config(const Json& j, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

/// Canonical JSON of the parts of the config that affect results (the
/// output directory and thread count are excluded).
Json config_to_json(const RunConfig& c);
/// FNV-1a 64-bit hash, hex.
std::string fnv1a_hex(const std::string& text);

/// Stage results, usable directly from code.
struct SolveOutcome {
    AssumptionReport check;
    FixedPointResult fixed;
    double residual = 0.0;
    double contraction = 0.0;
    DecayFit decay;
    RefinementStudy refinement;
};

struct LeafOutcome {
    Leaf leaf;
    InvarianceReport invariance;
    InvarianceReport control;
};

struct RunOptions {
    bool force = false;
    /// Overrides for the output directory (flag beats environment).
    std::optional<std::string> out_dir;
    bool quiet = false;
};

/// Runs one of check, solve, jets, leaves, reduce, demo and writes the
/// artifacts plus manifest.json. Returns the process exit code: 0 success,
/// 2 assumption failure, 3 no convergence, 4 config error, 1 other failure.
int run_command(const std::string& command, RunConfig config, const RunOptions& options);

/// Pure model used by the demo command.
MapSpec pure_model();

} // namespace folcomp
