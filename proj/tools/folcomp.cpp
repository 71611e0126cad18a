#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "folcomp/error.hpp"
#include "folcomp/parallel.hpp"
#include "folcomp/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Invariant stable foliations of Lorenz-type maps"};
    app.require_subcommand(1, 1);

    std::string config_path, map_path, out_dir;
    unsigned threads = 0;
    bool force = false, quiet = false;
    double tol = 0.0;
    int max_iter = 0;

    app.add_option("--config,-c", config_path, "Run configuration (JSON)");
    app.add_option("--map", map_path, "Map specification (JSON); overrides the config's map");
    app.add_option("--out,-o", out_dir, "Output directory; overrides FOLCOMP_OUT and the config");
    app.add_option("--threads", threads, "Worker thread cap (results do not depend on it)");
    app.add_option("--tol", tol, "Fixed-point tolerance");
    app.add_option("--max-iter", max_iter, "Iteration cap");
    app.add_flag("--force", force, "Proceed even when the assumption check fails");
    app.add_flag("--quiet,-q", quiet, "Suppress progress and tables");

    const char* commands[][2] = {
        {"check", "Estimate norms and check the standing assumptions"},
        {"solve", "Iterate the graph transform to its fixed point"},
        {"jets", "Fixed point plus derivative jets by fiber contraction"},
        {"leaves", "Fixed point plus leaves and the invariance audit"},
        {"reduce", "Fixed point plus the one-dimensional reduced map"},
        {"demo", "Run the full pipeline on the built-in pure model"},
    };
    for (const auto& c : commands) app.add_subcommand(c[0], c[1])->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 4;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    folcomp::RunConfig config;
    try {
        if (!config_path.empty()) config = folcomp::load_config(config_path);
        if (!map_path.empty()) {
            config.map = folcomp::load_map_spec(map_path);
            folcomp::validate(config.map);
            config.has_map = true;
        }
        if (tol > 0.0) config.tol = tol;
        if (max_iter > 0) config.max_iter = max_iter;
    } catch (const folcomp::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
    if (threads > 0) folcomp::set_thread_count(threads);

    folcomp::RunOptions options;
    options.force = force;
    options.quiet = quiet;
    if (!out_dir.empty()) options.out_dir = out_dir;
    return folcomp::run_command(command, config, options);
}
