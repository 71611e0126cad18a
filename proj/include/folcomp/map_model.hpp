#pragma once

#include <span>
#include <string>
#include <vector>

#include "folcomp/multilinear.hpp"

namespace folcomp {

/// coef * x_1^{powers[0]} ... x_n^{powers[n-1]}
struct Monomial {
    double coef = 0.0;
    std::vector<int> powers;

    bool operator==(const Monomial&) const = default;
};

/// One term p(x) |y|^{gamma + e} of a perturbation on side '+' (y > 0) or
/// '-' (y < 0). For F perturbations `component` selects the x coordinate;
/// G perturbations are scalar and use component 0.
struct PerturbationTerm {
    char side = '+';
    int component = 0;
    std::vector<Monomial> monomials;
    double e = 0.0;

    bool operator==(const PerturbationTerm&) const = default;
};

/// Lorenz-type map in normal form:
///   F = x*_s + |y|^alpha [B*_s + phi_s(x, y)],  G = y*_s + |y|^alpha [A*_s + psi_s(x, y)]
/// on the sides s = sign(y).
struct MapSpec {
    int n = 1;
    int k = 1;
    double alpha = 1.0;
    double gamma = 1.0;
    std::vector<double> x_star_plus{0.0};
    std::vector<double> x_star_minus{0.0};
    double y_star_plus = 0.0;
    double y_star_minus = 0.0;
    double A_star_plus = 1.0;
    double A_star_minus = 1.0;
    std::vector<double> B_star_plus{0.0};
    std::vector<double> B_star_minus{0.0};
    std::vector<PerturbationTerm> phi_coeffs;
    std::vector<PerturbationTerm> psi_coeffs;
    double K = 1.0;

    bool operator==(const MapSpec&) const = default;
};

/// Throws SpecInvalid describing the first violated invariant.
void validate(const MapSpec& spec);

/// Image of a point under T; `outside_D` flags images with |y| > 1 or some
/// |x_i| > 1.
struct Image {
    std::vector<double> x;
    double y = 0.0;
    bool outside_D = false;
};

/// A = F_x / G_y (n x n, row-major), B = F_y / G_y, C = G_x / G_y.
struct ABC {
    std::vector<double> A;
    std::vector<double> B;
    std::vector<double> C;
    double dyG = 0.0;
    /// F_x, row-major.
    std::vector<double> dxF;
};

/// Jets of A, B, C at a point: index j holds the j-th derivative as a
/// j-linear map on R^{n+1} (A flattened row-major into R^{n*n}).
struct ABCJets {
    std::vector<MLMap> A;
    std::vector<MLMap> B;
    std::vector<MLMap> C;
};

/// Validated, immutable evaluator for a MapSpec.
class LorenzMap {
public:
    explicit LorenzMap(MapSpec spec);

    const MapSpec& spec() const { return spec_; }
    int n() const { return spec_.n; }

    Image eval_T(std::span<const double> x, double y) const;
    ABC eval_ABC(std::span<const double> x, double y) const;

    /// D^0 T .. D^order T at (x, y) as symmetric maps R^{n+1} -> R^{n+1};
    /// level 0 is the value T(x, y). Output coordinate n is G.
    std::vector<MLMap> eval_DT_jet(std::span<const double> x, double y, int order) const;

    /// Jets of A, B, C through `order` from the jets of T through order + 1.
    ABCJets eval_ABC_jets(std::span<const double> x, double y, int order) const;

    /// Mixed partial of output `component` (n = G) with derivative counts
    /// `counts` over (x_1..x_n, y).
    double partial(std::span<const double> x, double y, int component, std::span<const int> counts) const;

private:
    struct Term {
        double coef;
        std::vector<int> powers;
        double yexp;
    };
    struct Side {
        std::vector<std::vector<Term>> terms; // per output component
        std::vector<double> offset;           // x*, then y*
    };

    const Side& side_for(double y) const;
    double dy_threshold(double y) const;

    MapSpec spec_;
    Side plus_;
    Side minus_;
};

/// Worst ratio |d^{l+m} p / dx^l dy^m| / |y|^{gamma-m} over samples for one
/// derivative order pair, maximised over phi and psi terms and multi-indices.
struct DecayRatio {
    int l = 0;
    int m = 0;
    double worst = 0.0;
};

struct L1Report {
    std::vector<DecayRatio> ratios;
    double worst = 0.0;
    bool pass = true;
};

/// Checks the perturbation decay estimates on sample points (y != 0). Works
/// on unvalidated specs so that ill-posed declarations can be diagnosed.
L1Report verify_L1_decay(const MapSpec& spec, std::span<const std::vector<double>> xs,
                         std::span<const double> ys);

} // namespace folcomp
