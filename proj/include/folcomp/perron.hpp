#pragma once

#include <vector>

namespace folcomp {

/// Perron data for order-i multilinear maps on R^{n+1} = E (+) F.
///
/// Block labels f in {E,F}^i are encoded as bitmasks: bit j set means
/// argument j lives in F (the y direction). `delta` is row-major 2^i x 2^i
/// with delta[g][f] = prod_j c(g(j), f(j)), and `weights` is its positive
/// right eigenvector normalised to unit l1 norm.
struct PerronData {
    int order = 0;
    std::vector<double> delta;
    double lambda = 0.0;
    std::vector<double> weights;
    int iterations = 0;
    /// True when zero norms were replaced by a positive floor before building.
    bool floored = false;

    std::size_t size() const { return weights.size(); }
    double entry(std::size_t g, std::size_t f) const { return delta[g * size() + f]; }
};

} // namespace folcomp
