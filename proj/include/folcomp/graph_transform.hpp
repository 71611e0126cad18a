#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "folcomp/grid.hpp"
#include "folcomp/map_model.hpp"

namespace folcomp {

struct ApplyStats {
    /// Output values scaled back to the L bound.
    std::size_t clamped_values = 0;
    /// Nodes whose image under T left D and was clamped before interpolation.
    std::size_t clamped_images = 0;
    std::size_t active_nodes = 0;
};

/// The value of the graph transform at one node from nu(T p) and A, B, C:
/// (nu_T A - C) / (1 - nu_T B). Throws DenominatorBreach when the
/// denominator is below 1e-9 in magnitude.
std::vector<double> gamma_formula(std::span<const double> nu_T, std::span<const double> A,
                                  std::span<const double> B, std::span<const double> C);

struct FixedPointResult {
    Field field;
    /// Sup-node distances between consecutive iterates.
    std::vector<double> history;
    bool converged = false;
    int iterations = 0;
    ApplyStats last_stats;

    /// Largest ratio d_{m+1} / d_m over the tail of the history (m >= 2).
    double observed_ratio() const;
};

/// Per-grid discretisation of the graph transform. Node images, their
/// interpolation stencils and A, B, C are computed once.
class GraphTransform {
public:
    GraphTransform(const LorenzMap& map, Grid grid, double L_bound);

    const LorenzMap& map() const { return *map_; }
    const Grid& grid() const { return grid_; }
    double L_bound() const { return L_; }

    struct Node {
        bool active = false;
        Stencil stencil;
        std::vector<double> A, B, C;
    };
    const Node& node(std::size_t i) const { return nodes_[i]; }

    Field zero_field() const { return Field(grid_, L_); }

    Field apply(const Field& f, ApplyStats* stats = nullptr) const;

    /// Iterates from `seed` until the sup distance drops to tol or max_iter
    /// applications were made. Never throws NoConvergence; see
    /// iterate_to_fixed_point.
    FixedPointResult iterate(const Field& seed, double tol, int max_iter) const;

    /// Worst ||G f1 - G f2|| / ||f1 - f2|| over random admissible pairs.
    double measure_contraction(int trials, std::uint64_t seed) const;

    /// Random admissible field: node values with norm <= L, zero on y = 0.
    Field random_field(std::uint64_t seed) const;

private:
    const LorenzMap* map_;
    Grid grid_;
    double L_;
    std::vector<Node> nodes_;
};

/// As GraphTransform::iterate but throws NoConvergence (with the observed
/// ratio) when the tolerance is not reached.
FixedPointResult iterate_to_fixed_point(const GraphTransform& gt, const Field& seed, double tol, int max_iter);

struct DecayFit {
    double slope = std::numeric_limits<double>::infinity();
    bool all_zero = true;
    int points = 0;
};

/// Least-squares slope of log||nu(x0, y)|| against log|y| over y nodes with
/// |y| in [y_lo, y_hi]; x0 is snapped to the nearest x node on every axis.
DecayFit decay_exponent(const NodeData& f, double x0 = 0.0, double y_lo = 1e-4, double y_hi = 0.1);

struct RefinementStudy {
    int M = 0;
    /// Sup difference of the fixed points on the common nodes.
    double common_diff = 0.0;
    /// common_diff * M^2.
    double fitted_constant = 0.0;
    /// Sup over fine nodes of |interpolated coarse field - fine field|.
    double interpolation_error = 0.0;
    int coarse_iterations = 0;
    int fine_iterations = 0;
};

/// Solves on `coarse` and on its refinement and compares the fixed points.
RefinementStudy refinement_study(const GraphTransform& coarse, const Field& coarse_fixed, double tol, int max_iter);

} // namespace folcomp
