#include "folcomp/graph_transform.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "folcomp/error.hpp"
#include "folcomp/parallel.hpp"

namespace folcomp {

std::vector<double> gamma_formula(std::span<const double> nu_T, std::span<const double> A, std::span<const double> B,
                                  std::span<const double> C) {
    const std::size_t n = nu_T.size();
    double nuB = 0.0;
    for (std::size_t r = 0; r < n; ++r) nuB += nu_T[r] * B[r];
    const double denom = 1.0 - nuB;
    if (!(std::abs(denom) >= 1e-9))
        throw Error(ErrorCode::DenominatorBreach, "|1 - nu(T) B| below 1e-9");
    std::vector<double> out(n);
    for (std::size_t c = 0; c < n; ++c) {
        double acc = 0.0;
        for (std::size_t r = 0; r < n; ++r) acc += nu_T[r] * A[r * n + c];
        out[c] = (acc - C[c]) / denom;
    }
    return out;
}

double FixedPointResult::observed_ratio() const {
    double worst = 0.0;
    for (std::size_t m = 1; m + 1 < history.size(); ++m) {
        if (history[m] < 1e-15) break;
        worst = std::max(worst, history[m + 1] / history[m]);
    }
    return worst;
}

GraphTransform::GraphTransform(const LorenzMap& map, Grid grid, double L_bound)
    : map_(&map), grid_(std::move(grid)), L_(L_bound), nodes_(grid_.node_count()) {
    if (grid_.n() != map.n()) throw Error(ErrorCode::OrderMismatch, "grid dimension differs from the map's n");
    parallel_for(nodes_.size(), [&](std::size_t i) {
        const double y = grid_.y_of(i);
        if (y == 0.0) return;
        Node& node = nodes_[i];
        node.active = true;
        const auto x = grid_.x_of(i);
        const Image img = map_->eval_T(x, y);
        node.stencil = make_stencil(grid_, img.x, img.y);
        ABC abc = map_->eval_ABC(x, y);
        node.A = std::move(abc.A);
        node.B = std::move(abc.B);
        node.C = std::move(abc.C);
    });
}

Field GraphTransform::apply(const Field& f, ApplyStats* stats) const {
    Field out(grid_, L_);
    const int n = grid_.n();
    std::vector<char> clamped(nodes_.size(), 0);
    parallel_for(nodes_.size(), [&](std::size_t i) {
        const Node& node = nodes_[i];
        if (!node.active) return;
        std::vector<double> nu_T(static_cast<std::size_t>(n));
        interpolate(f.data, node.stencil, nu_T);
        const double nv = row_norm(nu_T);
        if (nv > f.L_bound)
            for (double& v : nu_T) v *= f.L_bound / nv;
        auto value = gamma_formula(nu_T, node.A, node.B, node.C);
        const double vn = row_norm(value);
        if (vn > L_) {
            for (double& v : value) v *= L_ / vn;
            clamped[i] = 1;
        }
        std::copy(value.begin(), value.end(), out.value(i).begin());
    });
    if (stats) {
        *stats = ApplyStats{};
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (!nodes_[i].active) continue;
            ++stats->active_nodes;
            stats->clamped_values += clamped[i];
            stats->clamped_images += nodes_[i].stencil.clamped ? 1 : 0;
        }
    }
    return out;
}

FixedPointResult GraphTransform::iterate(const Field& seed, double tol, int max_iter) const {
    FixedPointResult r;
    r.field = seed;
    for (int it = 1; it <= max_iter; ++it) {
        Field next = apply(r.field, &r.last_stats);
        const double d = sup_distance(next.data, r.field.data);
        r.history.push_back(d);
        r.field = std::move(next);
        r.iterations = it;
        if (d <= tol) {
            r.converged = true;
            break;
        }
    }
    return r;
}

Field GraphTransform::random_field(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const int n = grid_.n();
    Field f = zero_field();
    const bool rough = rng() % 2 == 0;
    std::vector<double> coef(static_cast<std::size_t>(n) * (n + 1));
    for (double& c : coef) c = uni(rng);
    for (std::size_t i = 0; i < grid_.node_count(); ++i) {
        const double y = grid_.y_of(i);
        if (y == 0.0) continue;
        auto v = f.value(i);
        if (rough) {
            for (double& c : v) c = L_ * uni(rng);
        } else {
            const auto x = grid_.x_of(i);
            for (int r = 0; r < n; ++r) {
                double acc = coef[static_cast<std::size_t>(r) * (n + 1)];
                for (int a = 0; a < n; ++a) acc += coef[static_cast<std::size_t>(r) * (n + 1) + a + 1] * x[a];
                v[r] = L_ * y * acc / (n + 1);
            }
        }
        const double nv = row_norm(v);
        if (nv > L_)
            for (double& c : v) c *= L_ / nv;
    }
    return f;
}

double GraphTransform::measure_contraction(int trials, std::uint64_t seed) const {
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const Field f1 = random_field(seed + 2 * static_cast<std::uint64_t>(t));
        const Field f2 = random_field(seed + 2 * static_cast<std::uint64_t>(t) + 1);
        const double din = sup_distance(f1.data, f2.data);
        if (din == 0.0) continue;
        worst = std::max(worst, sup_distance(apply(f1).data, apply(f2).data) / din);
    }
    return worst;
}

FixedPointResult iterate_to_fixed_point(const GraphTransform& gt, const Field& seed, double tol, int max_iter) {
    FixedPointResult r = gt.iterate(seed, tol, max_iter);
    if (!r.converged)
        throw Error(ErrorCode::NoConvergence,
                    "graph transform did not reach tol " + std::to_string(tol) + " in " + std::to_string(max_iter) +
                        " steps (last distance " + std::to_string(r.history.empty() ? 0.0 : r.history.back()) +
                        ", observed ratio " + std::to_string(r.observed_ratio()) + ")");
    return r;
}

DecayFit decay_exponent(const NodeData& f, double x0, double y_lo, double y_hi) {
    const Grid& g = f.grid;
    const auto& xs = g.x_nodes();
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (std::abs(xs[i] - x0) < std::abs(xs[nearest] - x0)) nearest = i;
    std::size_t flat = 0;
    for (int a = 0; a < g.n(); ++a) flat = flat * xs.size() + nearest;

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    DecayFit fit;
    for (std::size_t j = 0; j < g.y_count(); ++j) {
        const double y = std::abs(g.y_nodes()[j]);
        if (y < y_lo || y > y_hi) continue;
        const double v = row_norm(f.at(g.index(flat, j)));
        if (v == 0.0) continue;
        const double lx = std::log(y), ly = std::log(v);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++fit.points;
    }
    if (fit.points == 0) return fit;
    fit.all_zero = false;
    const double m = fit.points;
    const double den = m * sxx - sx * sx;
    fit.slope = den == 0.0 ? std::numeric_limits<double>::quiet_NaN() : (m * sxy - sx * sy) / den;
    return fit;
}

RefinementStudy refinement_study(const GraphTransform& coarse, const Field& coarse_fixed, double tol, int max_iter) {
    RefinementStudy s;
    s.M = coarse.grid().M();
    const GraphTransform fine(coarse.map(), coarse.grid().refined(), coarse.L_bound());
    const FixedPointResult fr = iterate_to_fixed_point(fine, fine.zero_field(), tol, max_iter);
    s.fine_iterations = fr.iterations;

    const Grid& cg = coarse.grid();
    for (std::size_t i = 0; i < cg.node_count(); ++i) {
        const auto a = coarse_fixed.value(i);
        const auto b = fr.field.value(cg.refined_index(i));
        for (std::size_t r = 0; r < a.size(); ++r) s.common_diff = std::max(s.common_diff, std::abs(a[r] - b[r]));
    }
    s.fitted_constant = s.common_diff * static_cast<double>(s.M) * s.M;

    const Grid& fg = fine.grid();
    std::vector<double> err(fg.node_count(), 0.0);
    parallel_for(fg.node_count(), [&](std::size_t i) {
        const auto x = fg.x_of(i);
        const auto v = interpolate(coarse_fixed, x, fg.y_of(i));
        const auto b = fr.field.value(i);
        double e = 0.0;
        for (std::size_t r = 0; r < v.size(); ++r) e = std::max(e, std::abs(v[r] - b[r]));
        err[i] = e;
    });
    for (double e : err) s.interpolation_error = std::max(s.interpolation_error, e);
    return s;
}

} // namespace folcomp
