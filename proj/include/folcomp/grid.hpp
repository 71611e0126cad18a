#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace folcomp {

/// Tensor grid over D = [-1,1]^n x [-1,1]. The y axis is graded towards the
/// singular plane y = 0: nodes +-(j/M)^p for j = 1..M plus 0. Each x axis has
/// `x_resolution` equispaced nodes.
///
/// Nodes are numbered with x_1 most significant and y fastest.
class Grid {
public:
    Grid() = default;
    Grid(int n, int M, double p, int x_resolution);

    int n() const { return n_; }
    int M() const { return M_; }
    double p() const { return p_; }
    int x_resolution() const { return x_res_; }

    const std::vector<double>& x_nodes() const { return x_nodes_; }
    const std::vector<double>& y_nodes() const { return y_nodes_; }

    std::size_t y_count() const { return y_nodes_.size(); }
    std::size_t x_count() const { return x_count_; }
    std::size_t node_count() const { return x_count_ * y_nodes_.size(); }
    std::size_t zero_index() const { return static_cast<std::size_t>(M_); }

    std::size_t index(std::size_t x_flat, std::size_t y_index) const { return x_flat * y_nodes_.size() + y_index; }
    std::size_t x_flat(std::size_t node) const { return node / y_nodes_.size(); }
    std::size_t y_index(std::size_t node) const { return node % y_nodes_.size(); }

    /// Coordinates of a node.
    void x_of(std::size_t node, std::span<double> x) const;
    double y_of(std::size_t node) const { return y_nodes_[y_index(node)]; }
    std::vector<double> x_of(std::size_t node) const;

    /// Smallest nonzero |y| on the grid, (1/M)^p.
    double y_min() const;

    /// Grid with M doubled and x spacing halved; every node of this grid is
    /// a node of the refined grid.
    Grid refined() const;
    /// Node of the refined grid coinciding with `node`.
    std::size_t refined_index(std::size_t node) const;

    bool operator==(const Grid& other) const = default;

private:
    int n_ = 1;
    int M_ = 1;
    double p_ = 1.0;
    int x_res_ = 2;
    std::size_t x_count_ = 0;
    std::vector<double> x_nodes_;
    std::vector<double> y_nodes_;
};

/// Interpolation stencil for one query point: the corner nodes of the
/// containing cell with their multilinear weights.
struct Stencil {
    std::vector<std::size_t> nodes;
    std::vector<double> weights;
    /// True when the query point was moved into D first.
    bool clamped = false;
};

/// Builds the stencil for (x, y), clamping each coordinate into [-1, 1].
/// Cells never straddle y = 0 because 0 is a node.
Stencil make_stencil(const Grid& grid, std::span<const double> x, double y);

/// Per-node vectors of a fixed width on a grid.
struct NodeData {
    Grid grid;
    int width = 1;
    std::vector<double> values;

    NodeData() = default;
    NodeData(Grid g, int w) : grid(std::move(g)), width(w), values(grid.node_count() * static_cast<std::size_t>(w), 0.0) {}

    std::span<double> at(std::size_t node) {
        return std::span<double>(values).subspan(node * static_cast<std::size_t>(width), static_cast<std::size_t>(width));
    }
    std::span<const double> at(std::size_t node) const {
        return std::span<const double>(values).subspan(node * static_cast<std::size_t>(width),
                                                       static_cast<std::size_t>(width));
    }

    bool operator==(const NodeData& other) const = default;
};

/// Weighted sum of the stencil's node values.
void interpolate(const NodeData& data, const Stencil& stencil, std::span<double> out);

/// Max over nodes of the absolute entrywise difference.
double sup_distance(const NodeData& a, const NodeData& b);

/// A row-vector field nu : D -> R^{1 x n} with the admissible bound L.
struct Field {
    NodeData data;
    double L_bound = 0.0;

    Field() = default;
    Field(Grid grid, double L) : data(grid, grid.n()), L_bound(L) {}

    const Grid& grid() const { return data.grid; }
    std::span<double> value(std::size_t node) { return data.at(node); }
    std::span<const double> value(std::size_t node) const { return data.at(node); }

    bool operator==(const Field& other) const = default;
};

/// Euclidean norm of a row vector.
double row_norm(std::span<const double> v);

/// Interpolates f at (x, y) and clamps the result in norm to L_bound.
std::vector<double> interpolate(const Field& f, std::span<const double> x, double y);

/// Max node norm of f.
double sup_norm(const Field& f);

} // namespace folcomp
