#pragma once

#include <string>
#include <vector>

#include "folcomp/grid.hpp"
#include "folcomp/map_model.hpp"
#include "folcomp/multilinear.hpp"
#include "folcomp/perron.hpp"

namespace folcomp {

/// Resolution used for a norm estimate.
struct GridMeta {
    int M = 0;
    double p = 0.0;
    int x_resolution = 0;
    std::size_t nodes = 0;
    /// Maxima over finitely many nodes bound the true suprema from below.
    std::string caveat = "node maxima, lower bounds of the suprema over D*";
};

/// Estimated suprema over D* of ||A||, ||B||, ||C||, |G_y|, ||F_x||.
struct NormBundle {
    double normA = 0.0;
    double normB = 0.0;
    double normC = 0.0;
    double normDyG = 0.0;
    double normDxF = 0.0;
    GridMeta grid_meta;
};

/// Bundle from the three coefficient norms only (|G_y| and ||F_x|| zero).
NormBundle make_bundle(double normA, double normB, double normC, double normDyG = 0.0, double normDxF = 0.0);

/// Node maxima over the grid (y != 0). Throws NormDiverging when probing
/// ever finer layers next to y = 0 grows the |G_y| estimate more than 10x.
NormBundle estimate_norms(const LorenzMap& map, const Grid& grid, NormKind kind = NormKind::spectral);

struct L2Result {
    bool holds = false;
    double margin = 0.0;
};

/// 1 - ||A|| > 2 sqrt(||B|| ||C||), with margin (1 - ||A||) - 2 sqrt(||B|| ||C||).
L2Result check_L2(const NormBundle& b);

/// Smaller nonnegative root of ||B|| L^2 - (1 - ||A||) L + ||C|| = 0.
double compute_L(const NormBundle& b);

/// max over m + n = i of (||A|| + ||B||)^m (||C|| + 1)^n.
double compute_Lambda(const NormBundle& b, int i);

/// How the squared factorial prefactor of Theta is read: (2 i!)^2 or ((2i)!)^2.
enum class FactorialReading { twice_factorial, factorial_of_twice };

double compute_Theta(const NormBundle& b, int i, FactorialReading reading = FactorialReading::twice_factorial);

struct L3Report {
    bool a = false;
    bool b = false;
    bool extra = false;
    /// Theta(1..k), index 0 is Theta(1).
    std::vector<double> theta;
};

L3Report check_L3(const NormBundle& b, int k, FactorialReading reading = FactorialReading::twice_factorial);

/// Perron data for order i. Throws NotPositive when any of ||A||, ||B||,
/// ||C|| vanishes.
PerronData build_perron(const NormBundle& b, int i);

/// As build_perron, but zero norms are first raised to 1e-9 and the result
/// is flagged.
PerronData build_perron_floored(const NormBundle& b, int i);

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

/// Assumption check at a grid and at its refinement.
struct AssumptionReport {
    NormBundle bundle;
    NormBundle refined;
    L2Result l2;
    L3Report l3;
    L2Result l2_refined;
    L3Report l3_refined;
    /// Theta(1..k) under the alternative factorial reading.
    std::vector<double> theta_alternative;
    /// Lambda(1..k).
    std::vector<double> Lambda;
    /// Perron data for orders 1..k (floored when needed).
    std::vector<PerronData> perron;
    double L = 0.0;
    Verdict verdict = Verdict::fail;
    /// Failed conditions, e.g. "L2", "L3(a)", "L3(b)".
    std::vector<std::string> failures;
};

AssumptionReport check_assumptions(const LorenzMap& map, const Grid& grid,
                                   FactorialReading reading = FactorialReading::twice_factorial,
                                   NormKind kind = NormKind::spectral);

} // namespace folcomp
