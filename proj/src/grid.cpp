#include "folcomp/grid.hpp"

#include <algorithm>
#include <cmath>

#include "folcomp/error.hpp"

namespace folcomp {

Grid::Grid(int n, int M, double p, int x_resolution) : n_(n), M_(M), p_(p), x_res_(x_resolution) {
    if (n < 1 || n > 3) throw Error(ErrorCode::ConfigError, "grid dimension n must lie in [1, 3]");
    if (M < 1) throw Error(ErrorCode::ConfigError, "grid M must be >= 1");
    if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorCode::ConfigError, "grid grading power p must be >= 1");
    if (x_resolution < 2) throw Error(ErrorCode::ConfigError, "grid x_resolution must be >= 2");

    x_nodes_.resize(static_cast<std::size_t>(x_resolution));
    const double span = x_resolution - 1;
    for (int i = 0; i < x_resolution; ++i) x_nodes_[i] = (2.0 * i - span) / span;

    y_nodes_.resize(static_cast<std::size_t>(2 * M + 1));
    for (int j = 1; j <= M; ++j) {
        const double v = std::pow(static_cast<double>(j) / M, p);
        y_nodes_[M + j] = v;
        y_nodes_[M - j] = -v;
    }
    y_nodes_[M] = 0.0;

    x_count_ = 1;
    for (int a = 0; a < n; ++a) x_count_ *= static_cast<std::size_t>(x_resolution);
}

void Grid::x_of(std::size_t node, std::span<double> x) const {
    std::size_t flat = x_flat(node);
    for (int a = n_ - 1; a >= 0; --a) {
        x[a] = x_nodes_[flat % static_cast<std::size_t>(x_res_)];
        flat /= static_cast<std::size_t>(x_res_);
    }
}

std::vector<double> Grid::x_of(std::size_t node) const {
    std::vector<double> x(static_cast<std::size_t>(n_));
    x_of(node, x);
    return x;
}

double Grid::y_min() const { return y_nodes_[static_cast<std::size_t>(M_) + 1]; }

Grid Grid::refined() const { return Grid(n_, 2 * M_, p_, 2 * x_res_ - 1); }

std::size_t Grid::refined_index(std::size_t node) const {
    const std::size_t fine_res = static_cast<std::size_t>(2 * x_res_ - 1);
    const std::size_t fine_y = 2 * y_nodes_.size() - 1;
    std::size_t flat = x_flat(node);
    std::size_t fine_flat = 0;
    std::size_t scale = 1;
    for (int a = n_ - 1; a >= 0; --a) {
        fine_flat += 2 * (flat % static_cast<std::size_t>(x_res_)) * scale;
        flat /= static_cast<std::size_t>(x_res_);
        scale *= fine_res;
    }
    return fine_flat * fine_y + 2 * y_index(node);
}

namespace {

// Cell [nodes[i], nodes[i+1]] containing v and the local coordinate in it.
void locate(const std::vector<double>& nodes, double v, std::size_t& cell, double& t) {
    auto it = std::upper_bound(nodes.begin(), nodes.end(), v);
    std::size_t i = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
    i = std::min(i, nodes.size() - 2);
    cell = i;
    t = (v - nodes[i]) / (nodes[i + 1] - nodes[i]);
}

} // namespace

Stencil make_stencil(const Grid& grid, std::span<const double> x, double y) {
    const int n = grid.n();
    Stencil s;
    std::vector<std::size_t> cell(static_cast<std::size_t>(n + 1));
    std::vector<double> t(static_cast<std::size_t>(n + 1));
    for (int a = 0; a <= n; ++a) {
        double v = a < n ? x[a] : y;
        if (!(v >= -1.0)) {
            v = -1.0;
            s.clamped = true;
        } else if (v > 1.0) {
            v = 1.0;
            s.clamped = true;
        }
        locate(a < n ? grid.x_nodes() : grid.y_nodes(), v, cell[a], t[a]);
    }
    const std::size_t corners = std::size_t{1} << (n + 1);
    s.nodes.reserve(corners);
    s.weights.reserve(corners);
    const std::size_t xres = static_cast<std::size_t>(grid.x_resolution());
    for (std::size_t c = 0; c < corners; ++c) {
        double w = 1.0;
        std::size_t flat = 0;
        for (int a = 0; a < n; ++a) {
            const bool hi = (c >> a) & 1u;
            w *= hi ? t[a] : 1.0 - t[a];
            flat = flat * xres + cell[a] + (hi ? 1 : 0);
        }
        const bool hi = (c >> n) & 1u;
        w *= hi ? t[n] : 1.0 - t[n];
        if (w == 0.0) continue;
        s.nodes.push_back(grid.index(flat, cell[n] + (hi ? 1 : 0)));
        s.weights.push_back(w);
    }
    return s;
}

void interpolate(const NodeData& data, const Stencil& stencil, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t c = 0; c < stencil.nodes.size(); ++c) {
        const auto v = data.at(stencil.nodes[c]);
        const double w = stencil.weights[c];
        for (int r = 0; r < data.width; ++r) out[r] += w * v[r];
    }
}

double sup_distance(const NodeData& a, const NodeData& b) {
    if (a.values.size() != b.values.size())
        throw Error(ErrorCode::OrderMismatch, "sup_distance: node data sizes differ");
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

double row_norm(std::span<const double> v) {
    if (v.size() == 1) return std::abs(v[0]);
    double acc = 0.0;
    for (double c : v) acc += c * c;
    return std::sqrt(acc);
}

std::vector<double> interpolate(const Field& f, std::span<const double> x, double y) {
    std::vector<double> out(static_cast<std::size_t>(f.data.width));
    interpolate(f.data, make_stencil(f.grid(), x, y), out);
    const double nv = row_norm(out);
    if (nv > f.L_bound) {
        const double s = f.L_bound / nv;
        for (double& c : out) c *= s;
    }
    return out;
}

double sup_norm(const Field& f) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.grid().node_count(); ++i) m = std::max(m, row_norm(f.value(i)));
    return m;
}

} // namespace folcomp
