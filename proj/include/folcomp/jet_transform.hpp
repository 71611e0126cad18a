#pragma once

#include <string>
#include <vector>

#include "folcomp/graph_transform.hpp"
#include "folcomp/multilinear.hpp"
#include "folcomp/perron.hpp"

namespace folcomp {

/// The state (nu_0, nu_1, .., nu_i): nu_0 is a field and level j >= 1 holds a
/// symmetric j-linear map R^{n+1} x .. -> R^n at every node, stored as the
/// MLMap coefficients ((n+1)^j * n values per node).
struct JetField {
    Field nu;
    /// levels[j - 1] is level j.
    std::vector<NodeData> levels;

    int order() const { return static_cast<int>(levels.size()); }
    /// Level j at a node as an MLMap (j = 0 gives nu_0 as an order-0 map).
    MLMap value(int j, std::size_t node) const;
    void set(int j, std::size_t node, const MLMap& m);

    bool operator==(const JetField& other) const = default;
};

JetField zero_jets(const Grid& grid, double L_bound, int order);

enum class JetMode { exact, fd, automatic };
std::string to_string(JetMode mode);
JetMode parse_jet_mode(const std::string& s);

/// Derivative data of T and of A, B, C at one point, through `order`.
struct PointJets {
    std::vector<MLMap> T;
    ABCJets abc;
};

PointJets point_jets(const LorenzMap& map, std::span<const double> x, double y, int order);

/// Psi^i at a point from the point's derivative data and the values of
/// nu_0 .. nu_i at its image T(p). Also reports the three parts: the q = 0
/// term (U1), the q = i term (U2) and the middle terms (U3).
struct PsiParts {
    MLMap U1, U2, U3;
    MLMap total() const;
};
PsiParts psi_parts(const PointJets& jets, std::span<const MLMap> nu_at_image, int i);
MLMap psi_at(const PointJets& jets, std::span<const MLMap> nu_at_image, int i);

/// Per-level sup distances of one fiber step.
struct FiberStep {
    std::vector<double> adapted;
    std::vector<double> max_coeff;
};

struct FiberResult {
    JetField jets;
    /// history[m][j]: adapted-norm sup distance of level j at step m.
    std::vector<FiberStep> history;
    bool converged = false;
    int iterations = 0;
    /// Levels at or below this order were computed by Psi; higher levels by
    /// finite differences of the level below.
    int exact_order = 0;
    /// Per-level worst ratio d_{m+1} / d_m (m >= 2, above roundoff).
    std::vector<double> observed_ratios() const;
};

/// Discretised fiber map (nu_0, .., nu_i) -> (Gamma nu_0, Psi^1, .., Psi^i).
class JetTransform {
public:
    JetTransform(const GraphTransform& gt, int order, JetMode mode);

    int order() const { return order_; }
    int exact_order() const { return exact_; }
    const GraphTransform& graph() const { return *gt_; }

    JetField zero_jets() const { return folcomp::zero_jets(gt_->grid(), gt_->L_bound(), order_); }

    /// Psi^i on every node from a frozen state (exact levels only).
    NodeData psi_apply(const JetField& jets, int i) const;

    /// One Jacobi step: every level is computed from the old state; levels
    /// above exact_order() are finite differences of the new level below.
    JetField step(const JetField& jets) const;

    /// Iterates until every level's sup distance (adapted norms with the
    /// given Perron data, index j - 1 for level j) is at most tol.
    FiberResult iterate(const JetField& seed, double tol, int max_iter, std::span<const PerronData> perron,
                        NormKind kind = NormKind::spectral) const;

private:
    const GraphTransform* gt_;
    int order_;
    int exact_;
    std::vector<PointJets> cache_;
};

/// Throws NoConvergence with the per-level ratios when tol is not reached.
FiberResult fiber_iterate(const JetTransform& jt, const JetField& seed, double tol, int max_iter,
                          std::span<const PerronData> perron, NormKind kind = NormKind::spectral);

/// Finite-difference derivative of a level-j grid function: level j + 1
/// values, symmetrised, zero on y = 0. Uses second-order central
/// differences on the (non-uniform) nodes and one-sided ones at the edges.
NodeData grid_derivative(const NodeData& level, int j, int n);

struct VanishingLevel {
    int level = 0;
    std::vector<double> deltas;
    std::vector<double> maxima;
    bool monotone = false;
    bool below_tolerance = false;
    double slope = 0.0;
};

/// For each level, max adapted norm over nodes with |y| <= delta for
/// delta in {0.1, 0.01, 0.001}.
std::vector<VanishingLevel> verify_vanishing(const JetField& jets, std::span<const PerronData> perron, double tol,
                                             NormKind kind = NormKind::spectral);

} // namespace folcomp
