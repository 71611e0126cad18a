#include "folcomp/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "folcomp/error.hpp"

namespace folcomp {

namespace {

[[noreturn]] void bad_spec(const std::string& what) { throw Error(ErrorCode::SpecInvalid, what); }

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) bad_spec(where + " must be a JSON object");
    for (const auto& item : j.items())
        if (!allowed.count(item.key())) bad_spec("unknown field '" + item.key() + "' in " + where);
}

double get_number(const Json& j, const std::string& key) {
    if (!j.contains(key)) bad_spec("missing field '" + key + "'");
    if (!j.at(key).is_number()) bad_spec("field '" + key + "' must be a number");
    return j.at(key).get<double>();
}

int get_int(const Json& j, const std::string& key) {
    if (!j.at(key).is_number_integer()) bad_spec("field '" + key + "' must be an integer");
    return j.at(key).get<int>();
}

std::vector<double> get_vector(const Json& j, const std::string& key) {
    if (!j.contains(key)) bad_spec("missing field '" + key + "'");
    const Json& v = j.at(key);
    if (!v.is_array()) bad_spec("field '" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) bad_spec("field '" + key + "' must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<PerturbationTerm> get_terms(const Json& j, const std::string& key) {
    std::vector<PerturbationTerm> terms;
    if (!j.contains(key)) return terms;
    if (!j.at(key).is_array()) bad_spec("field '" + key + "' must be an array");
    for (const auto& t : j.at(key)) {
        reject_unknown(t, {"side", "component", "monomials", "e"}, key);
        PerturbationTerm term;
        if (!t.contains("side") || !t.at("side").is_string()) bad_spec(key + ": side must be \"+\" or \"-\"");
        const auto side = t.at("side").get<std::string>();
        if (side != "+" && side != "-") bad_spec(key + ": side must be \"+\" or \"-\"");
        term.side = side[0];
        term.component = t.contains("component") ? get_int(t, "component") : 0;
        term.e = t.contains("e") ? get_number(t, "e") : 0.0;
        if (!t.contains("monomials") || !t.at("monomials").is_array()) bad_spec(key + ": monomials must be an array");
        for (const auto& m : t.at("monomials")) {
            reject_unknown(m, {"coef", "powers"}, key + " monomial");
            Monomial mono;
            mono.coef = get_number(m, "coef");
            if (!m.contains("powers") || !m.at("powers").is_array()) bad_spec(key + ": powers must be an array");
            for (const auto& p : m.at("powers")) {
                if (!p.is_number_integer()) bad_spec(key + ": powers must be integers");
                mono.powers.push_back(p.get<int>());
            }
            term.monomials.push_back(std::move(mono));
        }
        terms.push_back(std::move(term));
    }
    return terms;
}

Json terms_to_json(const std::vector<PerturbationTerm>& terms) {
    Json arr = Json::array();
    for (const auto& t : terms) {
        Json monos = Json::array();
        for (const auto& m : t.monomials) monos.push_back({{"coef", m.coef}, {"powers", m.powers}});
        arr.push_back({{"side", std::string(1, t.side)}, {"component", t.component}, {"monomials", monos}, {"e", t.e}});
    }
    return arr;
}

} // namespace

Json map_spec_to_json(const MapSpec& s) {
    Json j;
    j["n"] = s.n;
    j["k"] = s.k;
    j["alpha"] = s.alpha;
    j["gamma"] = s.gamma;
    j["x_star_plus"] = s.x_star_plus;
    j["x_star_minus"] = s.x_star_minus;
    j["y_star_plus"] = s.y_star_plus;
    j["y_star_minus"] = s.y_star_minus;
    j["A_star_plus"] = s.A_star_plus;
    j["A_star_minus"] = s.A_star_minus;
    j["B_star_plus"] = s.B_star_plus;
    j["B_star_minus"] = s.B_star_minus;
    j["phi_coeffs"] = terms_to_json(s.phi_coeffs);
    j["psi_coeffs"] = terms_to_json(s.psi_coeffs);
    j["K"] = s.K;
    return j;
}

MapSpec map_spec_from_json(const Json& j) {
    reject_unknown(j,
                   {"n", "k", "alpha", "gamma", "x_star_plus", "x_star_minus", "y_star_plus", "y_star_minus",
                    "A_star_plus", "A_star_minus", "B_star_plus", "B_star_minus", "phi_coeffs", "psi_coeffs", "K"},
                   "map spec");
    MapSpec s;
    s.n = j.contains("n") ? get_int(j, "n") : 1;
    if (!j.contains("k")) bad_spec("missing field 'k'");
    s.k = get_int(j, "k");
    s.alpha = get_number(j, "alpha");
    s.gamma = get_number(j, "gamma");
    s.x_star_plus = get_vector(j, "x_star_plus");
    s.x_star_minus = get_vector(j, "x_star_minus");
    s.y_star_plus = get_number(j, "y_star_plus");
    s.y_star_minus = get_number(j, "y_star_minus");
    s.A_star_plus = get_number(j, "A_star_plus");
    s.A_star_minus = get_number(j, "A_star_minus");
    s.B_star_plus = get_vector(j, "B_star_plus");
    s.B_star_minus = get_vector(j, "B_star_minus");
    s.phi_coeffs = get_terms(j, "phi_coeffs");
    s.psi_coeffs = get_terms(j, "psi_coeffs");
    s.K = get_number(j, "K");
    return s;
}

MapSpec load_map_spec(const std::string& path) {
    Json j;
    try {
        j = Json::parse(read_text(path));
    } catch (const Json::parse_error& e) {
        bad_spec("cannot parse " + path + ": " + e.what());
    }
    return map_spec_from_json(j);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << content;
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json grid_to_json(const Grid& g) {
    return {{"n", g.n()}, {"M", g.M()}, {"p", g.p()}, {"x_resolution", g.x_resolution()}, {"nodes", g.node_count()}};
}

Grid grid_from_json(const Json& j) {
    return Grid(j.at("n").get<int>(), j.at("M").get<int>(), j.at("p").get<double>(), j.at("x_resolution").get<int>());
}

std::string node_data_csv(const NodeData& data, const std::vector<std::string>& names) {
    const Grid& g = data.grid;
    std::string out;
    for (int a = 0; a < g.n(); ++a) out += "x" + std::to_string(a + 1) + ",";
    out += "y";
    for (const auto& name : names) out += "," + name;
    out += '\n';
    std::vector<double> x(static_cast<std::size_t>(g.n()));
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        g.x_of(i, x);
        for (double c : x) out += format_double(c) + ",";
        out += format_double(g.y_of(i));
        for (double v : data.at(i)) out += "," + format_double(v);
        out += '\n';
    }
    return out;
}

NodeData parse_node_data_csv(const std::string& text, const Grid& grid, int width) {
    NodeData data(grid, width);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::IoError, "empty node CSV");
    std::vector<double> x(static_cast<std::size_t>(grid.n()));
    std::size_t node = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (node >= grid.node_count()) throw Error(ErrorCode::IoError, "node CSV has too many rows");
        std::vector<double> cells;
        const char* p = line.c_str();
        while (*p) {
            char* end = nullptr;
            cells.push_back(std::strtod(p, &end));
            if (end == p) throw Error(ErrorCode::IoError, "malformed number in node CSV");
            p = *end == ',' ? end + 1 : end;
        }
        if (cells.size() != static_cast<std::size_t>(grid.n() + 1 + width))
            throw Error(ErrorCode::IoError, "node CSV row has the wrong number of columns");
        grid.x_of(node, x);
        for (int a = 0; a < grid.n(); ++a)
            if (cells[a] != x[a]) throw Error(ErrorCode::IoError, "node CSV coordinates do not match the grid");
        if (cells[grid.n()] != grid.y_of(node))
            throw Error(ErrorCode::IoError, "node CSV coordinates do not match the grid");
        std::copy(cells.begin() + grid.n() + 1, cells.end(), data.at(node).begin());
        ++node;
    }
    if (node != grid.node_count()) throw Error(ErrorCode::IoError, "node CSV has too few rows");
    return data;
}

std::string field_csv(const Field& field) {
    std::vector<std::string> names;
    for (int r = 0; r < field.grid().n(); ++r) names.push_back("nu" + std::to_string(r + 1));
    return node_data_csv(field.data, names);
}

Field parse_field_csv(const std::string& text, const Grid& grid, double L_bound) {
    Field f(grid, L_bound);
    f.data = parse_node_data_csv(text, grid, grid.n());
    return f;
}

std::string leaf_csv(const Leaf& leaf) {
    const std::size_t n = leaf.base.x.size();
    std::string out;
    for (std::size_t a = 0; a < n; ++a) out += "x" + std::to_string(a + 1) + ",";
    out += "y\n";
    for (const auto& s : leaf.samples) {
        for (double c : s.x) out += format_double(c) + ",";
        out += format_double(s.y) + "\n";
    }
    return out;
}

std::string reduced_csv(const ReducedMap& rm) {
    std::string out = "y,G\n";
    for (const auto& s : rm.samples) out += format_double(s.y) + "," + format_double(s.G) + "\n";
    return out;
}

std::string render_svg(const std::string& title, const std::vector<SvgSeries>& series, double xmin, double xmax,
                       double ymin, double ymax) {
    const double W = 640, H = 480, pad = 40;
    auto sx = [&](double x) { return pad + (x - xmin) / (xmax - xmin) * (W - 2 * pad); };
    auto sy = [&](double y) { return H - pad - (y - ymin) / (ymax - ymin) * (H - 2 * pad); };
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
    out += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    out += "<rect x=\"" + num(pad) + "\" y=\"" + num(pad) + "\" width=\"" + num(W - 2 * pad) + "\" height=\"" +
           num(H - 2 * pad) + "\" fill=\"none\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
           title + "</text>\n";
    for (const auto& s : series) {
        if (s.xs.empty()) continue;
        out += "<path fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1\" d=\"";
        for (std::size_t i = 0; i < s.xs.size(); ++i)
            out += (i == 0 ? "M" : " L") + num(sx(s.xs[i])) + " " + num(sy(s.ys[i]));
        out += "\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace folcomp
