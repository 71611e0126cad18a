#include "folcomp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "folcomp/error.hpp"

namespace folcomp {

namespace {

[[noreturn]] void bad_config(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) bad_config(where + " must be a JSON object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || item.key() == a;
        if (!ok) bad_config("unknown key '" + item.key() + "' in " + where);
    }
}

double number_in(const Json& j, const char* key, double lo, double hi, bool open_lo = false) {
    if (!j.at(key).is_number()) bad_config(std::string(key) + " must be a number");
    const double v = j.at(key).get<double>();
    if (!(open_lo ? v > lo : v >= lo) || !(v <= hi))
        bad_config(std::string(key) + " = " + format_double(v) + " outside its range");
    return v;
}

int int_in(const Json& j, const char* key, long lo, long hi) {
    if (!j.at(key).is_number_integer()) bad_config(std::string(key) + " must be an integer");
    const long v = j.at(key).get<long>();
    if (v < lo || v > hi) bad_config(std::string(key) + " = " + std::to_string(v) + " outside its range");
    return static_cast<int>(v);
}

std::string reading_name(FactorialReading r) {
    return r == FactorialReading::twice_factorial ? "2k!" : "(2k)!";
}

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::SpecInvalid:
    case ErrorCode::IoError: return 4;
    case ErrorCode::NoConvergence: return 3;
    case ErrorCode::L2Violated:
    case ErrorCode::DegenerateDy:
    case ErrorCode::NormDiverging:
    case ErrorCode::DenominatorBreach:
    case ErrorCode::NearSingularDenominator:
    case ErrorCode::NotPositive: return 2;
    default: return 1;
    }
}

// JSON has no infinities or NaNs; those become null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json num_array(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

Json bundle_json(const NormBundle& b) {
    return {{"normA", num(b.normA)},
            {"normB", num(b.normB)},
            {"normC", num(b.normC)},
            {"normDyG", num(b.normDyG)},
            {"normDxF", num(b.normDxF)},
            {"grid", {{"M", b.grid_meta.M}, {"p", b.grid_meta.p}, {"x_resolution", b.grid_meta.x_resolution},
                      {"nodes", b.grid_meta.nodes}, {"caveat", b.grid_meta.caveat}}}};
}

Json verdicts_json(const L2Result& l2, const L3Report& l3) {
    Json j = {{"L2", l2.holds}, {"L2_margin", num(l2.margin)}};
    if (l2.holds) {
        j["L3a"] = l3.a;
        j["L3b"] = l3.b;
        j["L3b_side_condition"] = l3.extra;
        j["theta"] = num_array(l3.theta);
    }
    return j;
}

Json check_json(const AssumptionReport& r, FactorialReading reading) {
    Json perron = Json::array();
    for (const auto& pd : r.perron)
        perron.push_back({{"order", pd.order},
                          {"lambda", num(pd.lambda)},
                          {"weights", num_array(pd.weights)},
                          {"iterations", pd.iterations},
                          {"floored", pd.floored}});
    Json failures = Json::array();
    for (const auto& f : r.failures) failures.push_back(f);
    return {{"bundle", bundle_json(r.bundle)},
            {"refined_bundle", bundle_json(r.refined)},
            {"verdicts", verdicts_json(r.l2, r.l3)},
            {"refined_verdicts", verdicts_json(r.l2_refined, r.l3_refined)},
            {"L", num(r.L)},
            {"Lambda", num_array(r.Lambda)},
            {"factorial_reading", reading_name(reading)},
            {"theta_alternative_reading", num_array(r.theta_alternative)},
            {"perron", perron},
            {"failures", failures},
            {"verdict", to_string(r.verdict)}};
}

std::string check_table(const AssumptionReport& r) {
    std::ostringstream os;
    char buf[128];
    auto row = [&](const std::string& name, const std::string& value) {
        std::snprintf(buf, sizeof buf, "%-14s %s\n", name.c_str(), value.c_str());
        os << buf;
    };
    auto g = [](double v) {
        char b[40];
        std::snprintf(b, sizeof b, "%.6g", v);
        return std::string(b);
    };
    row("normA", g(r.bundle.normA));
    row("normB", g(r.bundle.normB));
    row("normC", g(r.bundle.normC));
    row("normDyG", g(r.bundle.normDyG));
    row("normDxF", g(r.bundle.normDxF));
    row("L2 margin", g(r.l2.margin) + (r.l2.holds ? "  pass" : "  FAIL"));
    if (r.l2.holds) {
        row("L", g(r.L));
        for (std::size_t i = 0; i < r.l3.theta.size(); ++i) row("Theta(" + std::to_string(i + 1) + ")", g(r.l3.theta[i]));
        row("L3(a)", r.l3.a ? "pass" : "FAIL");
        row("L3(b)", r.l3.b ? "pass" : "FAIL");
    }
    for (const auto& pd : r.perron)
        row("lambda(" + std::to_string(pd.order) + ")", g(pd.lambda) + (pd.floored ? "  (floored norms)" : ""));
    std::string verdict = to_string(r.verdict);
    for (const auto& f : r.failures) verdict += " " + f;
    if (r.verdict == Verdict::inconclusive) verdict = "INCONCLUSIVE (verdicts change under 2x refinement)";
    row("verdict", verdict);
    return os.str();
}

struct Stages {
    bool solve = false, jets = false, leaves = false, reduce = false, demo = false;
};

Stages stages_for(const std::string& command) {
    Stages s;
    if (command == "check") return s;
    s.solve = true;
    if (command == "solve") return s;
    if (command == "jets") s.jets = true;
    else if (command == "leaves") s.leaves = true;
    else if (command == "reduce") s.reduce = true;
    else if (command == "demo") s.jets = s.leaves = s.reduce = s.demo = true;
    else bad_config("unknown command '" + command + "'");
    return s;
}

std::vector<std::vector<double>> default_bases(int n) {
    std::vector<std::vector<double>> bases;
    for (double y : {-0.75, -0.5, -0.25, 0.25, 0.5, 0.75}) {
        std::vector<double> b(static_cast<std::size_t>(n), 0.0);
        b.push_back(y);
        bases.push_back(b);
    }
    return bases;
}

} // namespace

bool RunConfig::wants(const std::string& format) const {
    return std::find(formats.begin(), formats.end(), format) != formats.end();
}

Grid RunConfig::grid() const { return Grid(map.n, M, p, x_resolution); }

RunConfig parse_config(const Json& j, const std::string& base_dir) {
    reject_unknown(j,
                   {"map", "grid", "solver", "jets", "outputs", "seed", "norm", "factorial_reading", "leaves",
                    "reduce", "contraction_trials"},
                   "config");
    RunConfig c;
    if (j.contains("map")) {
        const Json& m = j.at("map");
        if (m.is_string()) {
            std::filesystem::path p(m.get<std::string>());
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            c.map = load_map_spec(p.string());
        } else {
            c.map = map_spec_from_json(m);
        }
        validate(c.map);
        c.has_map = true;
    }
    if (j.contains("grid")) {
        const Json& g = j.at("grid");
        reject_unknown(g, {"M", "p", "x_resolution"}, "grid");
        if (g.contains("M")) c.M = int_in(g, "M", 2, 100000);
        if (g.contains("p")) c.p = number_in(g, "p", 1.0, 10.0);
        if (g.contains("x_resolution")) c.x_resolution = int_in(g, "x_resolution", 2, 1001);
    }
    if (j.contains("solver")) {
        const Json& s = j.at("solver");
        reject_unknown(s, {"tol", "max_iter"}, "solver");
        if (s.contains("tol")) c.tol = number_in(s, "tol", 0.0, 1.0, true);
        if (s.contains("max_iter")) c.max_iter = int_in(s, "max_iter", 1, 1000000);
    }
    if (j.contains("jets")) {
        const Json& s = j.at("jets");
        reject_unknown(s, {"order", "mode"}, "jets");
        if (s.contains("order")) c.jet_order = int_in(s, "order", 0, kMaxOrder - 1);
        if (s.contains("mode")) {
            if (!s.at("mode").is_string()) bad_config("jets.mode must be a string");
            c.jet_mode = parse_jet_mode(s.at("mode").get<std::string>());
        }
    }
    if (j.contains("outputs")) {
        const Json& o = j.at("outputs");
        reject_unknown(o, {"directory", "formats"}, "outputs");
        if (o.contains("directory")) {
            if (!o.at("directory").is_string()) bad_config("outputs.directory must be a string");
            c.directory = o.at("directory").get<std::string>();
        }
        if (o.contains("formats")) {
            if (!o.at("formats").is_array()) bad_config("outputs.formats must be an array");
            c.formats.clear();
            for (const auto& f : o.at("formats")) {
                if (!f.is_string()) bad_config("outputs.formats entries must be strings");
                const auto s = f.get<std::string>();
                if (s != "csv" && s != "json" && s != "svg") bad_config("unknown output format '" + s + "'");
                c.formats.push_back(s);
            }
        }
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) bad_config("seed must be a nonnegative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("norm")) {
        const Json& v = j.at("norm");
        const std::string s = v.is_string() ? v.get<std::string>() : v.is_number_integer() ? std::to_string(v.get<int>()) : "";
        if (s == "2") c.norm = NormKind::spectral;
        else if (s == "frobenius") c.norm = NormKind::frobenius;
        else bad_config("norm must be \"2\" or \"frobenius\"");
    }
    if (j.contains("factorial_reading")) {
        const Json& v = j.at("factorial_reading");
        const std::string s = v.is_string() ? v.get<std::string>() : "";
        if (s == "2k!") c.reading = FactorialReading::twice_factorial;
        else if (s == "(2k)!") c.reading = FactorialReading::factorial_of_twice;
        else bad_config("factorial_reading must be \"2k!\" or \"(2k)!\"");
    }
    if (j.contains("leaves")) {
        const Json& l = j.at("leaves");
        reject_unknown(l, {"bases", "step"}, "leaves");
        if (l.contains("step")) c.leaf_step = number_in(l, "step", 0.0, 0.1, true);
        if (l.contains("bases")) {
            if (!l.at("bases").is_array()) bad_config("leaves.bases must be an array of points");
            for (const auto& b : l.at("bases")) {
                if (!b.is_array()) bad_config("leaves.bases entries must be arrays (x_1..x_n, y)");
                std::vector<double> pt;
                for (const auto& v : b) {
                    if (!v.is_number()) bad_config("leaves.bases entries must be numbers");
                    const double d = v.get<double>();
                    if (!(std::abs(d) <= 1.0)) bad_config("leaf base points must lie in D");
                    pt.push_back(d);
                }
                c.leaf_bases.push_back(pt);
            }
        }
    }
    if (j.contains("reduce")) {
        const Json& r = j.at("reduce");
        reject_unknown(r, {"transversal_x", "samples_per_side", "y_max"}, "reduce");
        if (r.contains("transversal_x")) c.transversal_x = number_in(r, "transversal_x", -1.0, 1.0);
        if (r.contains("samples_per_side")) c.samples_per_side = int_in(r, "samples_per_side", 2, 10000);
        if (r.contains("y_max")) c.reduce_y_max = number_in(r, "y_max", 1e-3, 1.0);
    }
    if (j.contains("contraction_trials")) c.contraction_trials = int_in(j, "contraction_trials", 1, 10000);
    if (c.has_map) {
        for (const auto& b : c.leaf_bases)
            if (b.size() != static_cast<std::size_t>(c.map.n + 1))
                bad_config("leaf base points need n + 1 coordinates");
        if (c.jet_order > c.map.k) bad_config("jets.order exceeds the map's smoothness order k");
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    Json j;
    try {
        j = Json::parse(read_text(path));
    } catch (const Json::parse_error& e) {
        bad_config("cannot parse " + path + ": " + e.what());
    }
    return parse_config(j, std::filesystem::path(path).parent_path().string().empty()
                               ? std::string(".")
                               : std::filesystem::path(path).parent_path().string());
}

Json config_to_json(const RunConfig& c) {
    Json bases = Json::array();
    for (const auto& b : c.leaf_bases) bases.push_back(b);
    Json j;
    j["map"] = c.has_map ? map_spec_to_json(c.map) : Json(nullptr);
    j["grid"] = {{"M", c.M}, {"p", c.p}, {"x_resolution", c.x_resolution}};
    j["solver"] = {{"tol", c.tol}, {"max_iter", c.max_iter}};
    j["jets"] = {{"order", c.jet_order}, {"mode", to_string(c.jet_mode)}};
    j["outputs"] = {{"formats", c.formats}};
    j["seed"] = c.seed;
    j["norm"] = c.norm == NormKind::spectral ? "2" : "frobenius";
    j["factorial_reading"] = reading_name(c.reading);
    j["leaves"] = {{"bases", bases}, {"step", c.leaf_step}};
    j["reduce"] = {{"transversal_x", c.transversal_x}, {"samples_per_side", c.samples_per_side}, {"y_max", c.reduce_y_max}};
    j["contraction_trials"] = c.contraction_trials;
    return j;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

MapSpec pure_model() {
    MapSpec s;
    s.n = 1;
    s.k = 2;
    s.alpha = 1.5;
    s.gamma = 1.5;
    s.x_star_plus = {0.5};
    s.x_star_minus = {-0.5};
    s.y_star_plus = -1.0;
    s.y_star_minus = 1.0;
    s.A_star_plus = 2.0;
    s.A_star_minus = -2.0;
    s.B_star_plus = {0.25};
    s.B_star_minus = {-0.25};
    s.K = 0.1;
    return s;
}

int run_command(const std::string& command, RunConfig config, const RunOptions& options) {
    std::string dir = config.directory;
    if (const char* env = std::getenv("FOLCOMP_OUT"); env && *env) dir = env;
    if (options.out_dir) dir = *options.out_dir;

    Json manifest;
    manifest["software"] = "folcomp";
    manifest["version"] = kVersion;
    manifest["command"] = command;
    Json stages_json = Json::object();
    int code = 0;
    auto log = [&](const std::string& msg) {
        if (!options.quiet) std::cerr << msg << '\n';
    };
    auto write = [&](const std::string& name, const std::string& content) { write_text(dir + "/" + name, content); };

    try {
        const Stages st = stages_for(command);
        if (st.demo) {
            config.map = pure_model();
            config.has_map = true;
        }
        if (!config.has_map) bad_config("no map given (config key 'map' or --map)");
        manifest["config_hash"] = fnv1a_hex(config_to_json(config).dump());
        manifest["config"] = config_to_json(config);

        const LorenzMap map(config.map);
        const Grid grid = config.grid();
        const int k = config.map.k;

        // Assumption check.
        const AssumptionReport report = check_assumptions(map, grid, config.reading, config.norm);
        stages_json["check"] = check_json(report, config.reading);
        const std::string table = check_table(report);
        if (!options.quiet) std::cout << table;
        if (config.wants("json")) write("check.json", stages_json["check"].dump(2) + "\n");
        write("check.txt", table);

        if (!st.solve) {
            code = report.verdict == Verdict::pass ? 0 : 2;
            if (code) log("assumption check did not pass: " + to_string(report.verdict));
        } else if (report.verdict != Verdict::pass && !options.force) {
            log("assumption check did not pass (" + to_string(report.verdict) + "); rerun with --force to proceed");
            code = 2;
        } else if (!report.l2.holds) {
            throw Error(ErrorCode::L2Violated, "L2 fails; no admissible L exists");
        } else {
            // Fixed point of the graph transform.
            const GraphTransform gt(map, grid, report.L);
            SolveOutcome so;
            so.fixed = iterate_to_fixed_point(gt, gt.zero_field(), config.tol, config.max_iter);
            so.residual = sup_distance(gt.apply(so.fixed.field).data, so.fixed.field.data);
            so.contraction = gt.measure_contraction(config.contraction_trials, config.seed);
            so.decay = decay_exponent(so.fixed.field.data);
            so.refinement = refinement_study(gt, so.fixed.field, config.tol, config.max_iter);
            const Field& nu = so.fixed.field;
            const double grid_error = so.refinement.interpolation_error;

            Json solve = {{"L_bound", num(report.L)},
                          {"iterations", so.fixed.iterations},
                          {"history", num_array(so.fixed.history)},
                          {"observed_ratio", num(so.fixed.observed_ratio())},
                          {"residual", num(so.residual)},
                          {"sup_norm", num(sup_norm(nu))},
                          {"clamped_values", so.fixed.last_stats.clamped_values},
                          {"clamped_images", so.fixed.last_stats.clamped_images},
                          {"active_nodes", so.fixed.last_stats.active_nodes},
                          {"contraction_trials", config.contraction_trials},
                          {"contraction_worst_ratio", num(so.contraction)},
                          {"decay_slope", num(so.decay.slope)},
                          {"decay_all_zero", so.decay.all_zero},
                          {"refinement",
                           {{"M", so.refinement.M},
                            {"common_node_difference", num(so.refinement.common_diff)},
                            {"fitted_constant", num(so.refinement.fitted_constant)},
                            {"interpolation_error", num(so.refinement.interpolation_error)},
                            {"fine_iterations", so.refinement.fine_iterations}}}};
            stages_json["solve"] = solve;
            if (config.wants("csv")) write("field.csv", field_csv(nu));
            if (config.wants("json"))
                write("field.json", Json({{"grid", grid_to_json(grid)},
                                          {"L_bound", num(report.L)},
                                          {"history", num_array(so.fixed.history)},
                                          {"sup_norm", num(sup_norm(nu))}})
                                        .dump(2) +
                                        "\n");
            log("solve: converged in " + std::to_string(so.fixed.iterations) + " steps, sup norm " +
                format_double(sup_norm(nu)));

            Json demo_checks = Json::object();
            if (st.demo) demo_checks["fixed_field_zero"] = sup_norm(nu) <= 1e-15;

            if (st.jets) {
                const int order = config.jet_order < 0 ? k : config.jet_order;
                const JetTransform jt(gt, order, config.jet_mode);
                std::vector<bool> theta_ok;
                bool diagnostic = false;
                for (int j = 1; j <= order; ++j) {
                    const bool ok = report.l3.theta[j - 1] < 1.0;
                    diagnostic = diagnostic || !ok;
                }
                if (diagnostic) log("jets: some Theta(j) >= 1, iterating in diagnostic mode");
                const FiberResult fr =
                    fiber_iterate(jt, jt.zero_jets(), config.tol, config.max_iter, report.perron, config.norm);
                const auto vanishing = verify_vanishing(fr.jets, report.perron, config.tol, config.norm);
                Json levels = Json::array();
                const auto ratios = fr.observed_ratios();
                for (int j = 0; j <= order; ++j) {
                    std::vector<double> hist, hist_max;
                    for (const auto& h : fr.history) {
                        hist.push_back(h.adapted[j]);
                        hist_max.push_back(h.max_coeff[j]);
                    }
                    Json lv = {{"level", j},
                               {"mode", j == 0 ? "graph" : (j <= fr.exact_order ? "exact" : "fd")},
                               {"history_adapted", num_array(hist)},
                               {"history_max_coefficient", num_array(hist_max)},
                               {"observed_ratio", num(ratios[j])}};
                    if (j >= 1) {
                        lv["theta"] = num(report.l3.theta[j - 1]);
                        lv["ratio_bound"] = num(std::max(so.contraction, report.l3.theta[j - 1]) + 0.05);
                        const auto& v = vanishing[j - 1];
                        lv["vanishing"] = {{"deltas", num_array(v.deltas)},
                                           {"maxima", num_array(v.maxima)},
                                           {"monotone", v.monotone},
                                           {"below_10_tol", v.below_tolerance},
                                           {"slope", num(v.slope)}};
                        if (config.wants("csv")) {
                            std::vector<std::string> names;
                            const std::size_t width = static_cast<std::size_t>(fr.jets.levels[j - 1].width);
                            for (std::size_t c = 0; c < width; ++c) names.push_back("c" + std::to_string(c));
                            write("jet_level" + std::to_string(j) + ".csv", node_data_csv(fr.jets.levels[j - 1], names));
                        }
                    }
                    levels.push_back(lv);
                }
                Json jets = {{"order", order},
                             {"mode", to_string(config.jet_mode)},
                             {"exact_order", fr.exact_order},
                             {"iterations", fr.iterations},
                             {"diagnostic_mode", diagnostic},
                             {"levels", levels}};
                stages_json["jets"] = jets;
                if (config.wants("json")) write("jets.json", jets.dump(2) + "\n");
                if (st.demo) {
                    double m = 0.0;
                    for (const auto& lv : fr.jets.levels)
                        for (double v : lv.values) m = std::max(m, std::abs(v));
                    demo_checks["jets_zero"] = m == 0.0;
                }
                log("jets: converged in " + std::to_string(fr.iterations) + " steps");
            }

            if (st.leaves) {
                const auto bases = config.leaf_bases.empty() ? default_bases(map.n()) : config.leaf_bases;
                Field doubled = nu;
                doubled.L_bound = 2.0 * nu.L_bound;
                for (double& v : doubled.data.values) v *= 2.0;
                const SlopeFn slope = field_slope(nu);
                const SlopeFn control = field_slope(doubled);
                const double budget = 10.0 * (config.tol + grid_error);
                Json leaves = Json::array();
                std::vector<SvgSeries> series;
                double horizontal = 0.0;
                for (std::size_t b = 0; b < bases.size(); ++b) {
                    LeafSample base{std::vector<double>(bases[b].begin(), bases[b].end() - 1), bases[b].back()};
                    const Leaf leaf = trace_leaf(slope, base, config.leaf_step);
                    const InvarianceReport inv = check_invariance(map, slope, leaf, config.leaf_step);
                    const Leaf wrong = trace_leaf(control, base, config.leaf_step);
                    const InvarianceReport ctl = check_invariance(map, control, wrong, config.leaf_step);
                    for (const auto& s : leaf.samples) horizontal = std::max(horizontal, std::abs(s.y - base.y));
                    leaves.push_back({{"base", bases[b]},
                                      {"samples", leaf.samples.size()},
                                      {"truncated", leaf.truncated},
                                      {"deviation", num(inv.max_deviation)},
                                      {"checked", inv.checked},
                                      {"images_outside", inv.outside},
                                      {"budget", num(budget)},
                                      {"within_budget", inv.max_deviation <= budget},
                                      {"control_deviation", num(ctl.max_deviation)}});
                    if (config.wants("csv")) write("leaf_" + std::to_string(b) + ".csv", leaf_csv(leaf));
                    if (map.n() == 1) {
                        SvgSeries s;
                        for (const auto& p : leaf.samples) {
                            s.xs.push_back(p.x[0]);
                            s.ys.push_back(p.y);
                        }
                        series.push_back(std::move(s));
                    }
                }
                Json lj = {{"leaves", leaves}, {"grid_error", num(grid_error)}, {"tol", num(config.tol)}};
                stages_json["leaves"] = lj;
                if (config.wants("json")) write("leaves.json", lj.dump(2) + "\n");
                if (config.wants("svg") && !series.empty())
                    write("leaves.svg", render_svg("leaves", series, -1.0, 1.0, -1.0, 1.0));
                if (st.demo) demo_checks["leaves_horizontal"] = horizontal == 0.0;
            }

            if (st.reduce) {
                const auto ys = signed_log_samples(-4.0, std::log10(config.reduce_y_max), config.samples_per_side);
                const ReducedMap rm = reduce_1d(map, field_slope(nu), config.transversal_x, ys, config.leaf_step);
                double odd = 0.0;
                for (std::size_t i = 0; i < rm.samples.size(); ++i)
                    odd = std::max(odd, std::abs(rm.samples[i].G + rm.samples[rm.samples.size() - 1 - i].G));
                Json rj = {{"transversal_x", num(rm.transversal_x)},
                           {"samples", rm.samples.size()},
                           {"G_zero_plus", num(rm.G_zero_plus)},
                           {"G_zero_minus", num(rm.G_zero_minus)},
                           {"alpha_fit", num(rm.alpha_fit)},
                           {"monotone_plus", rm.monotone_plus},
                           {"monotone_minus", rm.monotone_minus},
                           {"odd_symmetry_defect", num(odd)}};
                if (st.demo) {
                    double err = 0.0;
                    for (const auto& s : rm.samples) {
                        const double exact = s.y > 0 ? -1.0 + 2.0 * std::pow(s.y, 1.5) : 1.0 - 2.0 * std::pow(-s.y, 1.5);
                        err = std::max(err, std::abs(s.G - exact));
                    }
                    rj["closed_form_error"] = num(err);
                    demo_checks["reduced_closed_form"] = err <= 1e-6;
                }
                stages_json["reduce"] = rj;
                if (config.wants("csv")) write("reduced.csv", reduced_csv(rm));
                if (config.wants("json")) write("reduced.json", rj.dump(2) + "\n");
                if (config.wants("svg")) {
                    SvgSeries neg, pos;
                    for (const auto& s : rm.samples) {
                        (s.y < 0 ? neg : pos).xs.push_back(s.y);
                        (s.y < 0 ? neg : pos).ys.push_back(s.G);
                    }
                    write("reduced.svg", render_svg("reduced map", {neg, pos}, -1.0, 1.0, -1.0, 1.0));
                }
            }

            if (st.demo) {
                bool ok = true;
                for (const auto& item : demo_checks.items()) ok = ok && item.value().get<bool>();
                stages_json["demo"] = demo_checks;
                if (!ok) {
                    log("demo: a built-in check failed");
                    code = 1;
                }
            }
        }
    } catch (const Error& e) {
        code = exit_code_for(e.code());
        manifest["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
        std::cerr << "error: " << e.what() << '\n';
    }

    manifest["stages"] = stages_json;
    manifest["exit_code"] = code;
    try {
        write("manifest.json", manifest.dump(2) + "\n");
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        if (code == 0) code = 4;
    }
    return code;
}

} // namespace folcomp
