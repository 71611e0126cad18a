#pragma once

#include <functional>
#include <span>
#include <vector>

#include "folcomp/grid.hpp"
#include "folcomp/map_model.hpp"

namespace folcomp {

/// Slope field (x, y) -> nu(x, y) in R^{1 x n}.
using SlopeFn = std::function<void(std::span<const double> x, double y, std::span<double> out)>;

/// Slope function reading a field by interpolation.
SlopeFn field_slope(const Field& field);

/// Default x step of the leaf integrator.
inline constexpr double kLeafStep = 1e-3;

struct LeafSample {
    std::vector<double> x;
    double y = 0.0;
};

/// Integral surface y = h(x) of grad y = nu(x, y) through `base`, sampled
/// along the coordinate lines through the base point (for n = 1 this is the
/// whole curve, ordered by x).
struct Leaf {
    LeafSample base;
    double step = kLeafStep;
    std::vector<LeafSample> samples;
    /// True when the leaf left |y| <= 1 and was cut there.
    bool truncated = false;
};

/// Result of integrating along one straight segment in an axis direction.
struct SegmentResult {
    double y = 0.0;
    bool left_domain = false;
};

/// Integrates dy/dt = nu_axis(x(t), y) with x(t) moving along `axis` from
/// x[axis] to `target`, classical RK4 with the largest step <= `step` that
/// divides the distance evenly. When `trace` is given every step is appended.
SegmentResult integrate_segment(const SlopeFn& nu, std::vector<double> x, double y, int axis, double target,
                                double step = kLeafStep, std::vector<LeafSample>* trace = nullptr);

/// Integrates from (x0, y0) to x_target along the axis-ordered polyline
/// visiting the axes in `order`.
SegmentResult integrate_path(const SlopeFn& nu, std::span<const double> x0, double y0,
                             std::span<const double> x_target, std::span<const int> order, double step = kLeafStep);

Leaf trace_leaf(const SlopeFn& nu, const LeafSample& base, double step = kLeafStep);
Leaf trace_leaf(const Field& field, const LeafSample& base, double step = kLeafStep);

struct InvarianceReport {
    double max_deviation = 0.0;
    std::size_t checked = 0;
    /// Mapped samples outside D, excluded from the maximum.
    std::size_t outside = 0;
};

/// Maps the leaf's samples by T and measures how far they fall from the leaf
/// through T(base): for every image point the target leaf is integrated from
/// T(base) to the image's x and compared in y.
InvarianceReport check_invariance(const LorenzMap& map, const SlopeFn& nu, const Leaf& leaf,
                                  double step = kLeafStep);

struct ReducedSample {
    double y = 0.0;
    double G = 0.0;
};

/// One-dimensional quotient map on the transversal {x = transversal_x}.
struct ReducedMap {
    double transversal_x = 0.0;
    std::vector<ReducedSample> samples;
    /// Limits of the reduced map at y -> 0 from above and below.
    double G_zero_plus = 0.0;
    double G_zero_minus = 0.0;
    double alpha_fit = 0.0;
    bool monotone_plus = false;
    bool monotone_minus = false;
};

/// Signed log-spaced samples +-10^s, s in [lo, hi], `per_side` per side,
/// sorted ascending.
std::vector<double> signed_log_samples(double lo = -4.0, double hi = 0.0, int per_side = 81);

/// For each y: T(transversal, y) is slid along its leaf back to the
/// transversal. Throws LeafEscapes when a slide leaves D.
ReducedMap reduce_1d(const LorenzMap& map, const SlopeFn& nu, double transversal_x, std::span<const double> ys,
                     double step = kLeafStep);

/// |y difference| between integrating from base to target along the axes in
/// increasing and in decreasing order.
double path_independence(const SlopeFn& nu, std::span<const double> base_x, double base_y,
                         std::span<const double> target_x, double step = kLeafStep);

} // namespace folcomp
