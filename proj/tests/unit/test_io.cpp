#include <filesystem>
#include <random>

#include "doctest.h"
#include "folcomp/error.hpp"
#include "folcomp/io.hpp"
#include "oracles.hpp"

using namespace folcomp;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / "folcomp_unit" / name;
    std::filesystem::remove_all(p);
    return p;
}

} // namespace

TEST_CASE("map specs round-trip through JSON") {
    for (const char* name : {"pure_model.json", "perturbed_model.json", "l3b_failing_model.json"}) {
        const MapSpec s = load_map_spec(oracle::example_path(name));
        CHECK(map_spec_from_json(map_spec_to_json(s)) == s);
    }
    const MapSpec p = oracle::perturbed_spec();
    REQUIRE(p.psi_coeffs.size() == 2);
    CHECK(p.psi_coeffs[0].monomials[0].coef == 0.05);
    CHECK(p.psi_coeffs[1].side == '-');
}

TEST_CASE("malformed map specs") {
    Json j = map_spec_to_json(oracle::pure_spec());
    auto expect_invalid = [](const Json& doc) {
        try {
            (void)map_spec_from_json(doc);
            FAIL("accepted");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SpecInvalid);
        }
    };
    Json extra = j;
    extra["colour"] = "blue";
    expect_invalid(extra);
    Json wrong = j;
    wrong["alpha"] = "fast";
    expect_invalid(wrong);
    Json missing = j;
    missing.erase("K");
    expect_invalid(missing);
    Json side = j;
    side["psi_coeffs"] = Json::parse(R"([{"side": "up", "monomials": [], "e": 0}])");
    expect_invalid(side);
    try {
        (void)load_map_spec("/nonexistent/spec.json");
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoError);
    }
}

TEST_CASE("grid and field CSV round-trip") {
    const Grid g(2, 6, 2.0, 4);
    CHECK(grid_from_json(grid_to_json(g)) == g);
    Field f(g, 0.3);
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (std::size_t i = 0; i < g.node_count(); ++i)
        if (g.y_of(i) != 0.0)
            for (double& v : f.value(i)) v = u(rng);
    const std::string csv = field_csv(f);
    CHECK(csv.rfind("x1,x2,y,nu1,nu2\n", 0) == 0);
    CHECK(parse_field_csv(csv, g, 0.3) == f);
    CHECK_THROWS_AS(parse_field_csv(csv, Grid(2, 6, 2.0, 5), 0.3), Error);

    NodeData d(g, 3);
    for (double& v : d.values) v = u(rng);
    CHECK(parse_node_data_csv(node_data_csv(d, {"a", "b", "c"}), g, 3) == d);
}

TEST_CASE("writing files") {
    const auto dir = scratch("write");
    write_text((dir / "a" / "b.txt").string(), "hello\n");
    CHECK(read_text((dir / "a" / "b.txt").string()) == "hello\n");
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("leaf, reduced map and SVG output") {
    Leaf l;
    l.base = {{0.0}, 0.5};
    l.samples = {{{-1.0}, 0.5}, {{0.0}, 0.5}};
    CHECK(leaf_csv(l) == "x1,y\n-1,0.5\n0,0.5\n");
    ReducedMap rm;
    rm.samples = {{-0.5, 0.25}, {0.5, -0.25}};
    CHECK(reduced_csv(rm).rfind("y,G\n", 0) == 0);
    SvgSeries s;
    s.xs = {0, 1};
    s.ys = {0, 1};
    const std::string svg = render_svg("t", {s}, 0, 1, 0, 1);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<path") != std::string::npos);
}
