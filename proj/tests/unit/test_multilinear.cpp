#include <Eigen/Dense>
#include <random>

#include "doctest.h"
#include "folcomp/error.hpp"
#include "folcomp/multilinear.hpp"
#include "folcomp/norms.hpp"
#include "oracles.hpp"

using namespace folcomp;

namespace {

MLMap random_map(std::mt19937_64& rng, int order, int dim, int out) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    MLMap m(order, dim, out);
    for (double& c : m.coeffs()) c = u(rng);
    return m;
}

MLMap random_symmetric(std::mt19937_64& rng, int order, int dim, int out) {
    return symmetrize(random_map(rng, order, dim, out));
}

std::vector<double> form_apply(const Bilinear& f, const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r(static_cast<std::size_t>(f.out));
    f.apply(a, b, r);
    return r;
}

} // namespace

TEST_CASE("apply on basis vectors reproduces the coefficients") {
    std::mt19937_64 rng(1);
    const MLMap b = random_map(rng, 3, 3, 2);
    std::vector<int> idx(3);
    for (std::size_t t = 0; t < b.tuple_count(); ++t) {
        decode_tuple(t, 3, 3, idx);
        std::vector<std::vector<double>> args;
        for (int j : idx) {
            std::vector<double> e(3, 0.0);
            e[static_cast<std::size_t>(j)] = 1.0;
            args.push_back(e);
        }
        const auto v = b.apply(args);
        CHECK(v[0] == b.at(idx, 0));
        CHECK(v[1] == b.at(idx, 1));
    }
}

TEST_CASE("symmetrize") {
    std::mt19937_64 rng(2);
    SUBCASE("order 1 is the identity") {
        const MLMap b = random_map(rng, 1, 3, 2);
        CHECK(symmetrize(b) == b);
    }
    SUBCASE("two-element average") {
        MLMap b(2, 2, 1);
        const int i01[] = {0, 1}, i10[] = {1, 0};
        b.at(i01, 0) = 1.0;
        const MLMap s = symmetrize(b);
        CHECK(s.at(i01, 0) == 0.5);
        CHECK(s.at(i10, 0) == 0.5);
    }
    SUBCASE("idempotent to exact equality") {
        for (int trial = 0; trial < 20; ++trial) {
            const MLMap s = symmetrize(random_map(rng, 3, 3, 2));
            CHECK(symmetrize(s) == s);
            CHECK(is_symmetric(s));
        }
    }
    SUBCASE("does not increase the max-coefficient norm") {
        for (int trial = 0; trial < 20; ++trial) {
            const MLMap b = random_map(rng, 4, 2, 1);
            CHECK(symmetrize(b).max_abs() <= b.max_abs() + 1e-15);
        }
    }
}

TEST_CASE("blocks decompose a map with disjoint supports") {
    std::mt19937_64 rng(3);
    for (int order = 1; order <= 3; ++order) {
        const MLMap b = random_map(rng, order, 3, 2);
        MLMap sum(order, 3, 2);
        std::vector<int> hits(b.coeffs().size(), 0);
        for (unsigned mask = 0; mask < (1u << order); ++mask) {
            const MLMap blk = block(b, mask);
            sum += blk;
            for (std::size_t c = 0; c < blk.coeffs().size(); ++c)
                if (blk.coeffs()[c] != 0.0) ++hits[c];
        }
        CHECK(sum == b);
        for (int h : hits) CHECK(h <= 1);
    }
}

TEST_CASE("compositions enumerate ordered partitions") {
    const auto c = compositions(4, 2);
    REQUIRE(c.size() == 3);
    CHECK(c[0] == std::vector<int>{1, 3});
    CHECK(c[1] == std::vector<int>{2, 2});
    CHECK(c[2] == std::vector<int>{3, 1});
    CHECK(compositions(3, 3).size() == 1);
    CHECK(compositions(2, 3).empty());
}

TEST_CASE("phi_product and phi_compose follow their definitions") {
    std::mt19937_64 rng(4);
    const int n = 2, d = 3;
    const MLMap a = random_map(rng, 1, d, n);
    const MLMap b = random_map(rng, 2, d, n);
    const MLMap p = phi_product(Bilinear::row_times_column(n), a, b);
    const MLMap outer = random_map(rng, 2, d, n);
    const MLMap in1 = random_map(rng, 1, d, d), in2 = random_map(rng, 2, d, d);
    const MLMap inner[] = {in1, in2};
    const MLMap c = phi_compose(outer, inner);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::vector<double>> e;
        for (int j = 0; j < 3; ++j) e.push_back(oracle::random_unit(rng, d));
        const auto pa = a.apply(std::vector<std::vector<double>>{e[0]});
        const auto pb = b.apply(std::vector<std::vector<double>>{e[1], e[2]});
        double dot = 0.0;
        for (int r = 0; r < n; ++r) dot += pa[static_cast<std::size_t>(r)] * pb[static_cast<std::size_t>(r)];
        CHECK(p.apply(e)[0] == doctest::Approx(dot).epsilon(1e-13));

        const auto u = in1.apply(std::vector<std::vector<double>>{e[0]});
        const auto v = in2.apply(std::vector<std::vector<double>>{e[1], e[2]});
        const auto want = outer.apply(std::vector<std::vector<double>>{u, v});
        const auto got = c.apply(e);
        for (int r = 0; r < n; ++r)
            CHECK(got[static_cast<std::size_t>(r)] == doctest::Approx(want[static_cast<std::size_t>(r)]).epsilon(1e-13));
    }
}

TEST_CASE("dc_compose small cases") {
    SUBCASE("constant inner map gives zero") {
        std::mt19937_64 rng(5);
        const oracle::Poly nu = oracle::random_poly(rng, 2, 1, 3, 1.0);
        const std::vector<double> fp{0.2, -0.1};
        const auto outer = nu.jets(fp, 3);
        std::vector<MLMap> inner{MLMap::constant(fp, 2), MLMap(1, 2, 2), MLMap(2, 2, 2), MLMap(3, 2, 2)};
        for (int k = 1; k <= 3; ++k) CHECK(dc_compose(outer, inner, k, 1, k).max_abs() == 0.0);
    }
    SUBCASE("nu(u, v) = uv, f = (u^2, v), second order at (1, 1)") {
        oracle::Poly nu{2, 1, {{{1.0, {1, 1}}}}};
        oracle::Poly f{2, 2, {{{1.0, {2, 0}}}, {{1.0, {0, 1}}}}};
        const std::vector<double> p{1.0, 1.0};
        const MLMap d2 = dc_compose(nu.jets(f.value(p), 2), f.jets(p, 2), 2, 1, 2);
        // u^2 v has Hessian [[2v, 2u], [2u, 0]] = [[2, 2], [2, 0]].
        const oracle::VecFn g = [&](const std::vector<double>& q) { return nu.value(f.value(q)); };
        std::mt19937_64 rng(6);
        for (int t = 0; t < 10; ++t) {
            const auto u = oracle::random_unit(rng, 2);
            const auto want = oracle::richardson(g, p, u, 2, 1e-3);
            CHECK(oracle::diagonal(d2, u)[0] == doctest::Approx(want[0]).epsilon(1e-6));
        }
        const int i00[] = {0, 0}, i01[] = {0, 1}, i11[] = {1, 1};
        CHECK(d2.at(i00, 0) == doctest::Approx(2.0));
        CHECK(d2.at(i01, 0) == doctest::Approx(2.0));
        CHECK(d2.at(i11, 0) == doctest::Approx(0.0));
    }
    SUBCASE("order zero is plain composition") {
        const MLMap v = MLMap::constant(std::vector<double>{1.5, -2.0}, 3);
        const std::vector<MLMap> outer{v};
        const std::vector<MLMap> inner{MLMap::constant(std::vector<double>{0, 0, 0}, 3)};
        CHECK(dc_compose(outer, inner, 0, 0, 0) == v);
    }
    SUBCASE("incomplete jets are rejected") {
        std::vector<MLMap> outer{MLMap::scalar(1.0, 2), MLMap(1, 2, 1)};
        std::vector<MLMap> inner{MLMap::constant(std::vector<double>{0, 0}, 2), MLMap(1, 2, 2)};
        CHECK_THROWS_AS(dc_compose(outer, inner, 2, 1, 2), Error);
    }
}

TEST_CASE("dcp_product and dicp_inverse small cases") {
    std::mt19937_64 rng(7);
    const int n = 1, d = 2;
    const Bilinear form = Bilinear::row_times_column(n);
    const oracle::Poly f = oracle::random_poly(rng, d, d, 2, 0.5);
    const oracle::Poly B = oracle::random_poly(rng, d, n, 2, 0.3);
    const std::vector<double> p{0.1, 0.3};
    SUBCASE("constant B, first order: D(nu o f) B") {
        const oracle::Poly nu = oracle::random_poly(rng, d, n, 3, 0.3);
        oracle::Poly Bc{d, n, {{{0.7, {0, 0}}}}};
        const auto nuj = nu.jets(f.value(p), 1);
        const auto fj = f.jets(p, 1);
        const MLMap got = dcp_product(nuj, fj, Bc.jets(p, 1), form, 1, 0, 1);
        const MLMap chain = dc_compose(nuj, fj, 1, 1, 1) * 0.7;
        for (std::size_t c = 0; c < got.coeffs().size(); ++c)
            CHECK(got.coeffs()[c] == doctest::Approx(chain.coeffs()[c]).epsilon(1e-14));
    }
    SUBCASE("order zero is the plain product") {
        const oracle::Poly nu = oracle::random_poly(rng, d, n, 3, 0.3);
        const auto nuj = nu.jets(f.value(p), 0);
        const MLMap got = dcp_product(nuj, f.jets(p, 0), B.jets(p, 0), form, 0, 0, 0);
        const double want = nu.value(f.value(p))[0] * B.value(p)[0];
        CHECK(got.coeffs()[0] == doctest::Approx(want).epsilon(1e-14));
    }
    SUBCASE("nu = 0 gives zero inverse derivatives") {
        oracle::Poly zero{d, n, {{{0.0, {0, 0}}}}};
        for (int k = 1; k <= 3; ++k) {
            const MLMap r = dicp_inverse(zero.jets(f.value(p), k), f.jets(p, k), B.jets(p, k), form, k, 1, k, 1.0);
            CHECK(r.max_abs() == 0.0);
        }
    }
    SUBCASE("near-singular denominator") {
        const oracle::Poly nu = oracle::random_poly(rng, d, n, 2, 0.3);
        CHECK_THROWS_AS(dicp_inverse(nu.jets(f.value(p), 1), f.jets(p, 1), B.jets(p, 1), form, 1, 1, 1, 1e-12),
                        Error);
    }
}

// Random polynomial instances: every operator is compared with Richardson
// central differences of the function it differentiates, along random
// directions (a symmetric map is determined by its diagonal values).
TEST_CASE("chain, product and reciprocal rules match finite differences on random polynomials") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> upt(-0.5, 0.5);
    double worst_dc = 0.0, worst_dcp = 0.0, worst_dicp = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
        const int n = 1 + inst % 2, d = n + 1;
        const Bilinear form = Bilinear::row_times_column(n);
        const oracle::Poly f = oracle::random_poly(rng, d, d, 3, 0.5);
        const oracle::Poly nu = oracle::random_poly(rng, d, n, 3, 0.3);
        const oracle::Poly B = oracle::random_poly(rng, d, n, 2, 0.3);
        std::vector<double> p(static_cast<std::size_t>(d));
        for (double& x : p) x = upt(rng);

        const oracle::VecFn comp = [&](const std::vector<double>& q) { return nu.value(f.value(q)); };
        const oracle::VecFn prod = [&](const std::vector<double>& q) {
            return form_apply(form, nu.value(f.value(q)), B.value(q));
        };
        const oracle::VecFn recip = [&](const std::vector<double>& q) {
            return std::vector<double>{1.0 / (1.0 - prod(q)[0])};
        };
        const double denom = 1.0 - prod(p)[0];

        for (int k = 1; k <= 3; ++k) {
            const auto nuj = nu.jets(f.value(p), k);
            const auto fj = f.jets(p, k);
            const auto bj = B.jets(p, k);
            const MLMap dc = dc_compose(nuj, fj, k, 1, k);
            const MLMap dcp = dcp_product(nuj, fj, bj, form, k, 0, k);
            const MLMap dicp = dicp_inverse(nuj, fj, bj, form, k, 1, k, denom);
            CHECK(is_symmetric(dc, 1e-14));
            for (int t = 0; t < 3; ++t) {
                const auto u = oracle::random_unit(rng, d);
                const double h = oracle::fd_step(k);
                worst_dc = std::max(worst_dc, oracle::max_rel_error(oracle::diagonal(dc, u), oracle::richardson(comp, p, u, k, h)));
                worst_dcp = std::max(worst_dcp, oracle::max_rel_error(oracle::diagonal(dcp, u), oracle::richardson(prod, p, u, k, h)));
                worst_dicp = std::max(worst_dicp, oracle::max_rel_error(oracle::diagonal(dicp, u), oracle::richardson(recip, p, u, k, h)));
            }
        }
    }
    CHECK(worst_dc <= 1e-5);
    CHECK(worst_dcp <= 1e-5);
    CHECK(worst_dicp <= 1e-5);
}

TEST_CASE("leibniz and reciprocal_jets match finite differences") {
    std::mt19937_64 rng(9);
    const int d = 3, m = 2;
    const oracle::Poly a = oracle::random_poly(rng, d, m, 3, 0.5);
    const oracle::Poly s = oracle::random_poly(rng, d, 1, 3, 0.3);
    const std::vector<double> p{0.1, -0.2, 0.3};
    const Bilinear form = Bilinear::vector_times_scalar(m);
    const oracle::VecFn prod = [&](const std::vector<double>& q) {
        auto v = a.value(q);
        for (double& x : v) x *= s.value(q)[0];
        return v;
    };
    oracle::Poly g = s;
    g.comps[0].push_back({2.0, {0, 0, 0}});
    const oracle::VecFn inv = [&](const std::vector<double>& q) { return std::vector<double>{1.0 / g.value(q)[0]}; };
    const auto rj = reciprocal_jets(g.jets(p, 3), 3);
    REQUIRE(rj.size() == 4);
    CHECK(rj[0].coeffs()[0] == doctest::Approx(inv(p)[0]).epsilon(1e-15));
    for (int k = 1; k <= 3; ++k) {
        const MLMap l = leibniz(form, a.jets(p, k), s.jets(p, k), k);
        for (int t = 0; t < 5; ++t) {
            const auto u = oracle::random_unit(rng, d);
            CHECK(oracle::max_rel_error(oracle::diagonal(l, u), oracle::richardson(prod, p, u, k, oracle::fd_step(k))) <= 1e-5);
            CHECK(oracle::max_rel_error(oracle::diagonal(rj[static_cast<std::size_t>(k)], u),
                                        oracle::richardson(inv, p, u, k, oracle::fd_step(k))) <= 1e-5);
        }
    }
}

TEST_CASE("pushforward") {
    std::mt19937_64 rng(10);
    const int d = 3;
    SUBCASE("identity leaves the map unchanged") {
        const MLMap b = random_map(rng, 2, d, 2);
        const std::vector<double> id{1, 0, 0, 0, 1, 0, 0, 0, 1};
        CHECK(pushforward(b, id) == b);
    }
    SUBCASE("order one is a matrix product") {
        const MLMap b = random_map(rng, 1, d, 2);
        std::uniform_real_distribution<double> u(-1, 1);
        std::vector<double> mat(9);
        for (double& x : mat) x = u(rng);
        const MLMap pb = pushforward(b, mat);
        for (int j = 0; j < d; ++j)
            for (int r = 0; r < 2; ++r) {
                double want = 0.0;
                for (int i = 0; i < d; ++i) want += b.at(std::vector<int>{i}, r) * mat[static_cast<std::size_t>(i * d + j)];
                CHECK(pb.at(std::vector<int>{j}, r) == doctest::Approx(want).epsilon(1e-14));
            }
    }
    SUBCASE("order two matches the definition on random arguments") {
        const MLMap b = random_map(rng, 2, d, 2);
        std::uniform_real_distribution<double> u(-1, 1);
        std::vector<double> mat(9);
        for (double& x : mat) x = u(rng);
        const MLMap pb = pushforward(b, mat);
        auto mul = [&](const std::vector<double>& v) {
            std::vector<double> r(3, 0.0);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) r[static_cast<std::size_t>(i)] += mat[static_cast<std::size_t>(i * 3 + j)] * v[static_cast<std::size_t>(j)];
            return r;
        };
        for (int t = 0; t < 100; ++t) {
            const auto x = oracle::random_unit(rng, d), y = oracle::random_unit(rng, d);
            const auto got = pb.apply(std::vector<std::vector<double>>{x, y});
            const auto want = b.apply(std::vector<std::vector<double>>{mul(x), mul(y)});
            for (int r = 0; r < 2; ++r) CHECK(std::abs(got[static_cast<std::size_t>(r)] - want[static_cast<std::size_t>(r)]) <= 1e-12);
        }
    }
}

TEST_CASE("spectral_norm agrees with a dense SVD") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 30; ++trial) {
        const int rows = 1 + trial % 4, cols = 1 + (trial / 4) % 9;
        Eigen::MatrixXd m(rows, cols);
        std::vector<double> flat;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                m(r, c) = g(rng);
                flat.push_back(m(r, c));
            }
        const double want = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
        CHECK(spectral_norm(flat, rows, cols) == doctest::Approx(want).epsilon(1e-6));
    }
}

TEST_CASE("adapted norm") {
    PerronData pd;
    pd.order = 1;
    pd.weights = {0.3, 0.7};
    SUBCASE("zero map") { CHECK(adapted_norm(MLMap(1, 2, 1), pd) == 0.0); }
    SUBCASE("single E block") {
        MLMap b(1, 2, 1);
        b.at(std::vector<int>{0}, 0) = 2.0;
        CHECK(adapted_norm(b, pd) == doctest::Approx(0.6));
    }
    SUBCASE("order mismatch") { CHECK_THROWS_AS(adapted_norm(MLMap(2, 2, 1), pd), Error); }
    SUBCASE("contraction of the worst-case pushforward by lambda") {
        const PerronData p1 = build_perron(make_bundle(0.1, 0.1, 0.1), 1);
        std::mt19937_64 rng(12);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        int violations = 0;
        for (int t = 0; t < 1000; ++t) {
            const MLMap b = random_map(rng, 1, 2, 1);
            const std::vector<double> dt{0.1 * u(rng), 0.1 * u(rng), 0.1 * u(rng), 1.0};
            if (adapted_norm(pushforward(b, dt), p1) > p1.lambda * adapted_norm(b, p1) * (1 + 1e-12)) ++violations;
        }
        CHECK(violations == 0);
    }
}

TEST_CASE("dump lists every coefficient") {
    MLMap b(1, 2, 1);
    b.at(std::vector<int>{1}, 0) = 0.5;
    const std::string s = dump(b);
    CHECK(s.find("order 1 dim 2 out 1") != std::string::npos);
    CHECK(s.find("0.5") != std::string::npos);
}
