#include <cmath>
#include <random>

#include "doctest.h"
#include "folcomp/error.hpp"
#include "folcomp/grid.hpp"

using namespace folcomp;

TEST_CASE("grid layout") {
    const Grid g(2, 10, 2.0, 5);
    CHECK(g.y_count() == 21);
    CHECK(g.x_count() == 25);
    CHECK(g.node_count() == 525);
    CHECK(g.y_nodes()[g.zero_index()] == 0.0);
    for (std::size_t j = 0; j < g.y_count(); ++j) CHECK(g.y_nodes()[j] == -g.y_nodes()[g.y_count() - 1 - j]);
    for (std::size_t j = 1; j < g.y_count(); ++j) CHECK(g.y_nodes()[j] > g.y_nodes()[j - 1]);
    CHECK(g.y_nodes().front() == -1.0);
    CHECK(g.y_nodes().back() == 1.0);
    CHECK(g.y_min() == doctest::Approx(0.01));
    CHECK(g.x_nodes().front() == -1.0);
    CHECK(g.x_nodes().back() == 1.0);
    CHECK(g.x_nodes()[2] == 0.0);
    // x_1 most significant.
    const std::size_t node = g.index(1 * 5 + 3, 7);
    const auto x = g.x_of(node);
    CHECK(x[0] == -0.5);
    CHECK(x[1] == 0.5);
    CHECK(g.y_of(node) == g.y_nodes()[7]);
    CHECK(g.x_flat(node) == 8);
    CHECK(g.y_index(node) == 7);
}

TEST_CASE("invalid grids") {
    CHECK_THROWS_AS(Grid(0, 10, 2.0, 5), Error);
    CHECK_THROWS_AS(Grid(1, 0, 2.0, 5), Error);
    CHECK_THROWS_AS(Grid(1, 10, 0.5, 5), Error);
    CHECK_THROWS_AS(Grid(1, 10, 2.0, 1), Error);
}

TEST_CASE("refinement keeps every node") {
    const Grid g(2, 7, 2.0, 4);
    const Grid r = g.refined();
    CHECK(r.M() == 14);
    CHECK(r.x_resolution() == 7);
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        const std::size_t rn = g.refined_index(node);
        CHECK(r.x_of(rn) == g.x_of(node));
        CHECK(r.y_of(rn) == g.y_of(node));
    }
}

TEST_CASE("interpolation") {
    const Grid g(1, 8, 2.0, 5);
    NodeData d(g, 2);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1, 1);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        d.at(i)[0] = u(rng);
        d.at(i)[1] = 3.25;
    }
    double out[2];
    SUBCASE("nodes are reproduced exactly") {
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            const auto x = g.x_of(i);
            interpolate(d, make_stencil(g, x, g.y_of(i)), out);
            CHECK(out[0] == d.at(i)[0]);
        }
    }
    SUBCASE("constants are reproduced") {
        for (int t = 0; t < 100; ++t) {
            const double x[] = {u(rng)};
            interpolate(d, make_stencil(g, x, u(rng)), out);
            CHECK(out[1] == doctest::Approx(3.25).epsilon(1e-15));
        }
    }
    SUBCASE("cells never straddle y = 0") {
        const double x[] = {0.13};
        for (double y : {1e-9, 0.01, -1e-9, -0.01}) {
            const Stencil s = make_stencil(g, x, y);
            for (std::size_t k = 0; k < s.nodes.size(); ++k) CHECK(g.y_of(s.nodes[k]) * y >= 0.0);
        }
        const Stencil z = make_stencil(g, x, 0.0);
        for (std::size_t k = 0; k < z.nodes.size(); ++k) CHECK(g.y_of(z.nodes[k]) == 0.0);
    }
    SUBCASE("points outside D are clamped") {
        const double x[] = {1.3};
        const Stencil s = make_stencil(g, x, -2.0);
        CHECK(s.clamped);
        interpolate(d, s, out);
        CHECK(out[0] == d.at(g.index(4, 0))[0]);
    }
    SUBCASE("multilinear in each direction") {
        NodeData lin(g, 1);
        for (std::size_t i = 0; i < g.node_count(); ++i) lin.at(i)[0] = 2.0 * g.x_of(i)[0] - 0.5 * g.y_of(i);
        for (int t = 0; t < 100; ++t) {
            const double x[] = {u(rng)};
            const double y = u(rng);
            interpolate(lin, make_stencil(g, x, y), out);
            CHECK(out[0] == doctest::Approx(2.0 * x[0] - 0.5 * y).epsilon(1e-13));
        }
    }
}

TEST_CASE("fields") {
    const Grid g(1, 4, 2.0, 3);
    Field f(g, 0.5);
    CHECK(sup_norm(f) == 0.0);
    for (std::size_t i = 0; i < g.node_count(); ++i)
        if (g.y_of(i) != 0.0) f.value(i)[0] = 0.4 * g.y_of(i);
    CHECK(sup_norm(f) == doctest::Approx(0.4));
    const double x[] = {0.0};
    CHECK(interpolate(f, x, 0.0)[0] == 0.0);
    Field big = f;
    big.L_bound = 0.1;
    CHECK(interpolate(big, x, 1.0)[0] == doctest::Approx(0.1));
    const double row[] = {3.0, 4.0};
    CHECK(row_norm(row) == 5.0);
    Field g2 = f;
    g2.value(3)[0] += 0.25;
    CHECK(sup_distance(f.data, g2.data) == doctest::Approx(0.25));
}
