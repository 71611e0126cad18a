#include "folcomp/norms.hpp"

#include <algorithm>
#include <cmath>

#include "folcomp/error.hpp"
#include "folcomp/parallel.hpp"

namespace folcomp {

namespace {

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

double matrix_norm(std::span<const double> m, int rows, int cols, NormKind kind) {
    if (kind == NormKind::frobenius) {
        double acc = 0.0;
        for (double c : m) acc += c * c;
        return std::sqrt(acc);
    }
    return spectral_norm(m, rows, cols);
}

double discriminant(const NormBundle& b) {
    return (1.0 - b.normA) * (1.0 - b.normA) - 4.0 * b.normB * b.normC;
}

} // namespace

NormBundle make_bundle(double normA, double normB, double normC, double normDyG, double normDxF) {
    NormBundle b;
    b.normA = normA;
    b.normB = normB;
    b.normC = normC;
    b.normDyG = normDyG;
    b.normDxF = normDxF;
    return b;
}

NormBundle estimate_norms(const LorenzMap& map, const Grid& grid, NormKind kind) {
    const int n = map.n();
    if (grid.n() != n) throw Error(ErrorCode::OrderMismatch, "grid dimension differs from the map's n");
    const std::size_t count = grid.node_count();
    std::vector<double> a(count, 0.0), b(count, 0.0), c(count, 0.0), dy(count, 0.0), dx(count, 0.0);
    parallel_for(count, [&](std::size_t i) {
        const double y = grid.y_of(i);
        if (y == 0.0) return;
        const auto x = grid.x_of(i);
        const ABC abc = map.eval_ABC(x, y);
        a[i] = matrix_norm(abc.A, n, n, kind);
        b[i] = row_norm(abc.B);
        c[i] = row_norm(abc.C);
        dy[i] = std::abs(abc.dyG);
        dx[i] = matrix_norm(abc.dxF, n, n, kind);
    });
    NormBundle out;
    for (std::size_t i = 0; i < count; ++i) {
        out.normA = std::max(out.normA, a[i]);
        out.normB = std::max(out.normB, b[i]);
        out.normC = std::max(out.normC, c[i]);
        out.normDyG = std::max(out.normDyG, dy[i]);
        out.normDxF = std::max(out.normDxF, dx[i]);
    }
    out.grid_meta = {grid.M(), grid.p(), grid.x_resolution(), count, GridMeta{}.caveat};

    for (double v : {out.normA, out.normB, out.normC, out.normDyG, out.normDxF})
        if (!std::isfinite(v)) throw Error(ErrorCode::NormDiverging, "non-finite norm estimate on the grid");

    // Probe layers y = +-(1 / (M 2^r))^p of successively refined grids.
    double probe = out.normDyG;
    for (int r = 1; r <= 10; ++r) {
        const double y = std::pow(1.0 / (grid.M() * std::ldexp(1.0, r)), grid.p());
        for (std::size_t xf = 0; xf < grid.x_count(); ++xf) {
            const auto x = grid.x_of(grid.index(xf, 0));
            for (double s : {y, -y}) {
                std::vector<int> counts(static_cast<std::size_t>(n + 1), 0);
                counts[n] = 1;
                probe = std::max(probe, std::abs(map.partial(x, s, n, counts)));
            }
        }
        if (!std::isfinite(probe) || probe > 10.0 * out.normDyG)
            throw Error(ErrorCode::NormDiverging,
                        "|dG/dy| grows without bound towards y = 0 (estimate rose from " +
                            std::to_string(out.normDyG) + " to " + std::to_string(probe) + ")");
    }
    return out;
}

L2Result check_L2(const NormBundle& b) {
    L2Result r;
    r.margin = (1.0 - b.normA) - 2.0 * std::sqrt(b.normB * b.normC);
    r.holds = r.margin > 0.0;
    return r;
}

double compute_L(const NormBundle& b) {
    const double disc = discriminant(b);
    if (disc < 0.0 || b.normA >= 1.0)
        throw Error(ErrorCode::L2Violated, "no admissible L: (1 - ||A||)^2 < 4 ||B|| ||C||");
    return 2.0 * b.normC / ((1.0 - b.normA) + std::sqrt(disc));
}

double compute_Lambda(const NormBundle& b, int i) {
    double best = 0.0;
    for (int m = 0; m <= i; ++m)
        best = std::max(best, std::pow(b.normA + b.normB, m) * std::pow(b.normC + 1.0, i - m));
    return best;
}

double compute_Theta(const NormBundle& b, int i, FactorialReading reading) {
    const double disc = discriminant(b);
    if (disc < 0.0) throw Error(ErrorCode::L2Violated, "Theta undefined: (1 - ||A||)^2 < 4 ||B|| ||C||");
    const double pre = reading == FactorialReading::twice_factorial ? 2.0 * factorial(i) : factorial(2 * i);
    const double denom = 1.0 + b.normA + std::sqrt(disc);
    return pre * pre * std::pow(b.normDyG, i) * (b.normA + b.normC * b.normB) * compute_Lambda(b, i) /
           (denom * denom);
}

L3Report check_L3(const NormBundle& b, int k, FactorialReading reading) {
    L3Report r;
    for (int i = 1; i <= std::max(k, 1); ++i) r.theta.push_back(compute_Theta(b, i, reading));
    r.a = r.theta[0] < 1.0;
    r.extra = b.normDyG >= 0.25 || b.normDxF >= 0.25;
    r.b = k < 2 || (r.theta[static_cast<std::size_t>(k) - 1] < 1.0 && r.extra);
    return r;
}

PerronData build_perron(const NormBundle& b, int i) {
    if (b.normA <= 0.0 || b.normB <= 0.0 || b.normC <= 0.0)
        throw Error(ErrorCode::NotPositive, "Perron matrix is not positive: a coefficient norm vanishes");
    if (i < 1 || i > kMaxOrder) throw Error(ErrorCode::OrderUnsupported, "Perron order out of range");
    PerronData pd;
    pd.order = i;
    const std::size_t size = std::size_t{1} << i;
    // c(E,E), c(E,F), c(F,E), c(F,F) indexed by 2 * g_bit + f_bit.
    const double c[4] = {b.normA, b.normB, b.normC, 1.0};
    pd.delta.assign(size * size, 1.0);
    for (std::size_t g = 0; g < size; ++g)
        for (std::size_t f = 0; f < size; ++f) {
            double v = 1.0;
            for (int j = 0; j < i; ++j) v *= c[2 * ((g >> j) & 1u) + ((f >> j) & 1u)];
            pd.delta[g * size + f] = v;
        }

    std::vector<double> w(size, 1.0 / static_cast<double>(size)), next(size);
    double lambda = 0.0;
    for (int it = 1; it <= 100000; ++it) {
        double sum = 0.0;
        for (std::size_t g = 0; g < size; ++g) {
            double acc = 0.0;
            for (std::size_t f = 0; f < size; ++f) acc += pd.delta[g * size + f] * w[f];
            next[g] = acc;
            sum += acc;
        }
        for (double& v : next) v /= sum;
        double change = 0.0;
        for (std::size_t g = 0; g < size; ++g) change += std::abs(next[g] - w[g]);
        w.swap(next);
        const bool done = std::abs(sum - lambda) <= 1e-12 * sum && change <= 1e-12;
        lambda = sum;
        pd.iterations = it;
        if (done) break;
    }
    pd.lambda = lambda;
    pd.weights = w;
    return pd;
}

PerronData build_perron_floored(const NormBundle& b, int i) {
    NormBundle f = b;
    bool floored = false;
    for (double* v : {&f.normA, &f.normB, &f.normC})
        if (*v < 1e-9) {
            *v = 1e-9;
            floored = true;
        }
    PerronData pd = build_perron(f, i);
    pd.floored = floored;
    return pd;
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

AssumptionReport check_assumptions(const LorenzMap& map, const Grid& grid, FactorialReading reading,
                                   NormKind kind) {
    AssumptionReport r;
    const int k = map.spec().k;
    r.bundle = estimate_norms(map, grid, kind);
    r.refined = estimate_norms(map, grid.refined(), kind);

    auto evaluate = [&](const NormBundle& b, L2Result& l2, L3Report& l3) {
        l2 = check_L2(b);
        if (l2.holds) l3 = check_L3(b, k, reading);
        std::vector<std::string> failed;
        if (!l2.holds) {
            failed.push_back("L2");
        } else {
            if (!l3.a) failed.push_back("L3(a)");
            if (!l3.b) failed.push_back("L3(b)");
        }
        return failed;
    };
    r.failures = evaluate(r.bundle, r.l2, r.l3);
    const auto refined_failures = evaluate(r.refined, r.l2_refined, r.l3_refined);

    if (r.failures != refined_failures)
        r.verdict = Verdict::inconclusive;
    else
        r.verdict = r.failures.empty() ? Verdict::pass : Verdict::fail;

    if (r.l2.holds) {
        r.L = compute_L(r.bundle);
        for (int i = 1; i <= k; ++i) {
            r.theta_alternative.push_back(
                compute_Theta(r.bundle, i,
                              reading == FactorialReading::twice_factorial ? FactorialReading::factorial_of_twice
                                                                           : FactorialReading::twice_factorial));
        }
    }
    for (int i = 1; i <= k; ++i) {
        r.Lambda.push_back(compute_Lambda(r.bundle, i));
        r.perron.push_back(build_perron_floored(r.bundle, i));
    }
    return r;
}

} // namespace folcomp
