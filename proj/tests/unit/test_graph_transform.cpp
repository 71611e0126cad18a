#include <cmath>

#include "doctest.h"
#include "folcomp/error.hpp"
#include "folcomp/graph_transform.hpp"
#include "folcomp/norms.hpp"
#include "folcomp/parallel.hpp"
#include "oracles.hpp"

using namespace folcomp;

namespace {

struct Setup {
    LorenzMap map;
    Grid grid;
    double L;
    GraphTransform gt;
    Setup(const MapSpec& s, int M, int xres)
        : map(s), grid(s.n, M, 2.0, xres), L(compute_L(estimate_norms(map, grid))), gt(map, grid, L) {}
};

} // namespace

TEST_CASE("gamma formula") {
    const double nu[] = {0.1}, A[] = {0.2}, B[] = {0.1}, C[] = {0.01};
    CHECK(gamma_formula(nu, A, B, C)[0] == doctest::Approx(0.01 / 0.99).epsilon(1e-14));
    const double nu2[] = {10.0};
    try {
        (void)gamma_formula(nu2, A, B, C);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DenominatorBreach);
    }
}

TEST_CASE("pure model") {
    Setup s(oracle::pure_spec(), 40, 11);
    CHECK(s.L == 0.0);
    ApplyStats st;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const Field out = s.gt.apply(s.gt.random_field(seed), &st);
        CHECK(sup_norm(out) == 0.0);
        CHECK(st.clamped_values == 0);
    }
    const FixedPointResult r = iterate_to_fixed_point(s.gt, s.gt.random_field(9), 1e-10, 100);
    CHECK(r.converged);
    CHECK(sup_norm(r.field) == 0.0);
    CHECK(s.gt.measure_contraction(10, 1) == 0.0);
    const DecayFit fit = decay_exponent(r.field.data);
    CHECK(fit.all_zero);
    CHECK(std::isinf(fit.slope));
}

TEST_CASE("perturbed model") {
    Setup s(oracle::perturbed_spec(), 200, 41);
    const Grid& g = s.grid;

    SUBCASE("zero seed maps to -C") {
        const Field out = s.gt.apply(s.gt.zero_field());
        for (std::size_t i = 0; i < g.node_count(); i += 7) {
            if (g.y_of(i) == 0.0) continue;
            const auto x = g.x_of(i);
            CHECK(out.value(i)[0] == doctest::Approx(-s.map.eval_ABC(x, g.y_of(i)).C[0]).epsilon(1e-14));
        }
    }
    SUBCASE("admissible outputs, zero section, few clamps") {
        ApplyStats st;
        const Field out = s.gt.apply(s.gt.random_field(3), &st);
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            if (g.y_of(i) == 0.0) CHECK(out.value(i)[0] == 0.0);
            CHECK(row_norm(out.value(i)) <= s.L + 1e-12);
        }
        CHECK(st.clamped_values <= g.node_count() / 1000);
    }
    SUBCASE("fixed point, uniqueness and golden value") {
        const FixedPointResult r = iterate_to_fixed_point(s.gt, s.gt.zero_field(), 1e-10, 10000);
        CHECK(r.converged);
        CHECK(sup_distance(s.gt.apply(r.field).data, r.field.data) <= 1e-9);
        for (std::size_t m = 2; m + 1 < r.history.size(); ++m) CHECK(r.history[m + 1] / r.history[m] < 1.0);
        const FixedPointResult a = iterate_to_fixed_point(s.gt, s.gt.random_field(101), 1e-10, 10000);
        const FixedPointResult b = iterate_to_fixed_point(s.gt, s.gt.random_field(202), 1e-10, 10000);
        CHECK(sup_distance(a.field.data, r.field.data) <= 1e-9);
        CHECK(sup_distance(b.field.data, r.field.data) <= 1e-9);
        // nu*(0.3, 0.25): x node 26 of 41, y node (100/200)^2 above zero.
        const std::size_t node = g.index(26, g.zero_index() + 100);
        CHECK(g.x_of(node)[0] == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(g.y_of(node) == 0.25);
        CHECK(std::abs(r.field.value(node)[0] - -0x1.1046744a1ba91p-11) <= 1e-13);

        const DecayFit fit = decay_exponent(r.field.data);
        CHECK(std::abs(fit.slope - 2.5) <= 0.2);
    }
    SUBCASE("contraction") {
        const double q = s.gt.measure_contraction(50, 7);
        CHECK(q < 1.0);
        CHECK(q > 0.0);
    }
    SUBCASE("no convergence within the cap") {
        try {
            (void)iterate_to_fixed_point(s.gt, s.gt.zero_field(), 1e-10, 2);
            FAIL("no error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NoConvergence);
        }
    }
    SUBCASE("worker count does not change results") {
        const Field seed = s.gt.random_field(5);
        set_thread_count(1);
        const Field one = s.gt.apply(seed);
        set_thread_count(8);
        const Field eight = s.gt.apply(seed);
        set_thread_count(0);
        CHECK(one == eight);
    }
}

TEST_CASE("decay slope of a synthetic field") {
    const Grid g(1, 200, 2.0, 5);
    Field f(g, 1.0);
    for (std::size_t i = 0; i < g.node_count(); ++i) f.value(i)[0] = g.y_of(i) * g.y_of(i);
    CHECK(decay_exponent(f.data).slope == doctest::Approx(2.0).epsilon(0.005));
}

TEST_CASE("refinement stability is second order") {
    Setup coarse(oracle::perturbed_spec(), 50, 11);
    Setup finer(oracle::perturbed_spec(), 100, 21);
    const auto a = iterate_to_fixed_point(coarse.gt, coarse.gt.zero_field(), 1e-12, 1000);
    const auto b = iterate_to_fixed_point(finer.gt, finer.gt.zero_field(), 1e-12, 1000);
    const RefinementStudy ra = refinement_study(coarse.gt, a.field, 1e-12, 1000);
    const RefinementStudy rb = refinement_study(finer.gt, b.field, 1e-12, 1000);
    CHECK(ra.M == 50);
    CHECK(rb.common_diff < ra.common_diff);
    CHECK(rb.fitted_constant <= 2.0 * ra.fitted_constant);
}

TEST_CASE("a model violating L2 still reports its contraction ratio") {
    MapSpec s = oracle::perturbed_spec();
    s.A_star_plus = 0.4;
    s.A_star_minus = -0.4;
    s.phi_coeffs = {{'+', 0, {{0.95, {1}}}, 0.0}, {'-', 0, {{0.95, {1}}}, 0.0}};
    const LorenzMap m(s);
    const Grid g(1, 40, 2.0, 11);
    CHECK_FALSE(check_L2(estimate_norms(m, g)).holds);
    const GraphTransform gt(m, g, 0.05);
    const double q = gt.measure_contraction(10, 3);
    CHECK(std::isfinite(q));
}
