#include "folcomp/map_model.hpp"

#include <algorithm>
#include <cmath>

#include "folcomp/error.hpp"

namespace folcomp {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::SpecInvalid, what); }

bool finite(double v) { return std::isfinite(v); }

// d^a/dx^a x^p for integer p >= 0.
double power_derivative(double x, int p, int a) {
    if (a > p) return 0.0;
    double c = 1.0;
    for (int i = 0; i < a; ++i) c *= p - i;
    return c * std::pow(x, p - a);
}

// d^m/dy^m |y|^beta on the side s = sign(y).
double abs_power_derivative(double y, double beta, int m) {
    const double s = y > 0 ? 1.0 : -1.0;
    const double ay = std::abs(y);
    double c = 1.0;
    for (int i = 0; i < m; ++i) c *= beta - i;
    if (c == 0.0) return 0.0;
    return c * std::pow(ay, beta - m) * (m % 2 == 0 ? 1.0 : s);
}

struct RawTerm {
    double coef;
    const std::vector<int>* powers;
    double yexp;
};

double raw_partial(const RawTerm& t, std::span<const double> x, double y, std::span<const int> xcounts, int m) {
    double v = t.coef;
    for (std::size_t i = 0; i < x.size() && v != 0.0; ++i)
        v *= power_derivative(x[i], (*t.powers)[i], xcounts[i]);
    if (v == 0.0) return 0.0;
    return v * abs_power_derivative(y, t.yexp, m);
}

// Enumerates multi-indices of total degree l over n variables.
void multi_indices(int n, int l, std::vector<std::vector<int>>& out) {
    std::vector<int> cur(static_cast<std::size_t>(n), 0);
    auto rec = [&](auto&& self, int pos, int left) -> void {
        if (pos == n - 1) {
            cur[pos] = left;
            out.push_back(cur);
            return;
        }
        for (int a = 0; a <= left; ++a) {
            cur[pos] = a;
            self(self, pos + 1, left - a);
        }
    };
    rec(rec, 0, l);
}

} // namespace

void validate(const MapSpec& spec) {
    const auto n = static_cast<std::size_t>(spec.n);
    if (spec.n < 1) invalid("n must be a positive integer");
    if (spec.k < 1 || spec.k > kMaxOrder - 1)
        invalid("k must lie in [1, " + std::to_string(kMaxOrder - 1) + "]");
    if (!finite(spec.alpha) || spec.alpha <= 0.0) invalid("alpha must be > 0");
    if (!finite(spec.gamma) || spec.gamma <= spec.k - 1) invalid("gamma must exceed k - 1");
    if (!finite(spec.K) || spec.K <= 0.0) invalid("K must be > 0");
    if (!finite(spec.A_star_plus) || spec.A_star_plus == 0.0) invalid("A_star_plus must be nonzero");
    if (!finite(spec.A_star_minus) || spec.A_star_minus == 0.0) invalid("A_star_minus must be nonzero");
    if (!finite(spec.y_star_plus) || !finite(spec.y_star_minus)) invalid("y_star offsets must be finite");
    for (const auto* v : {&spec.x_star_plus, &spec.x_star_minus, &spec.B_star_plus, &spec.B_star_minus}) {
        if (v->size() != n) invalid("x_star and B_star vectors must have length n");
        for (double c : *v)
            if (!finite(c)) invalid("x_star and B_star entries must be finite");
    }
    auto check_terms = [&](const std::vector<PerturbationTerm>& terms, const char* name, int components) {
        for (const auto& t : terms) {
            if (t.side != '+' && t.side != '-') invalid(std::string(name) + ": side must be '+' or '-'");
            if (t.component < 0 || t.component >= components)
                invalid(std::string(name) + ": component out of range");
            if (!finite(t.e) || t.e < 0.0) invalid(std::string(name) + ": extra exponent e must be >= 0");
            for (const auto& mono : t.monomials) {
                if (!finite(mono.coef)) invalid(std::string(name) + ": coefficient must be finite");
                if (mono.powers.size() != n) invalid(std::string(name) + ": monomial needs n powers");
                for (int p : mono.powers)
                    if (p < 0) invalid(std::string(name) + ": powers must be >= 0");
            }
        }
    };
    check_terms(spec.phi_coeffs, "phi_coeffs", spec.n);
    check_terms(spec.psi_coeffs, "psi_coeffs", 1);
}

LorenzMap::LorenzMap(MapSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
    const int n = spec_.n;
    auto build = [&](Side& side, char sign, const std::vector<double>& xs, double ys, const std::vector<double>& bs,
                     double as) {
        side.terms.assign(static_cast<std::size_t>(n + 1), {});
        side.offset = xs;
        side.offset.push_back(ys);
        const std::vector<int> zero(static_cast<std::size_t>(n), 0);
        for (int r = 0; r < n; ++r)
            if (bs[r] != 0.0) side.terms[r].push_back({bs[r], zero, spec_.alpha});
        side.terms[n].push_back({as, zero, spec_.alpha});
        const double base = spec_.alpha + spec_.gamma;
        for (const auto& t : spec_.phi_coeffs) {
            if (t.side != sign) continue;
            for (const auto& mono : t.monomials)
                if (mono.coef != 0.0) side.terms[t.component].push_back({mono.coef, mono.powers, base + t.e});
        }
        for (const auto& t : spec_.psi_coeffs) {
            if (t.side != sign) continue;
            for (const auto& mono : t.monomials)
                if (mono.coef != 0.0) side.terms[n].push_back({mono.coef, mono.powers, base + t.e});
        }
    };
    build(plus_, '+', spec_.x_star_plus, spec_.y_star_plus, spec_.B_star_plus, spec_.A_star_plus);
    build(minus_, '-', spec_.x_star_minus, spec_.y_star_minus, spec_.B_star_minus, spec_.A_star_minus);
}

const LorenzMap::Side& LorenzMap::side_for(double y) const {
    if (y == 0.0) throw Error(ErrorCode::EvalAtSingular, "T is not defined on y = 0");
    return y > 0.0 ? plus_ : minus_;
}

double LorenzMap::dy_threshold(double y) const {
    const double scale = spec_.alpha * std::max(std::abs(spec_.A_star_plus), std::abs(spec_.A_star_minus)) *
                         std::pow(std::abs(y), spec_.alpha - 1.0);
    return 1e-12 * scale;
}

double LorenzMap::partial(std::span<const double> x, double y, int component, std::span<const int> counts) const {
    const Side& side = side_for(y);
    const int n = spec_.n;
    const int m = counts[n];
    bool none = m == 0;
    for (int i = 0; i < n; ++i) none = none && counts[i] == 0;
    double v = none ? side.offset[component] : 0.0;
    for (const auto& t : side.terms[component]) v += raw_partial({t.coef, &t.powers, t.yexp}, x, y, counts, m);
    return v;
}

Image LorenzMap::eval_T(std::span<const double> x, double y) const {
    const int n = spec_.n;
    std::vector<int> zero(static_cast<std::size_t>(n + 1), 0);
    Image img;
    img.x.resize(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
        img.x[r] = partial(x, y, r, zero);
        if (std::abs(img.x[r]) > 1.0) img.outside_D = true;
    }
    img.y = partial(x, y, n, zero);
    if (std::abs(img.y) > 1.0) img.outside_D = true;
    return img;
}

ABC LorenzMap::eval_ABC(std::span<const double> x, double y) const {
    const int n = spec_.n;
    std::vector<int> counts(static_cast<std::size_t>(n + 1), 0);
    counts[n] = 1;
    ABC out;
    out.dyG = partial(x, y, n, counts);
    if (!(std::abs(out.dyG) >= dy_threshold(y)))
        throw Error(ErrorCode::DegenerateDy, "dG/dy vanishes numerically at y = " + std::to_string(y));
    out.B.resize(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) out.B[r] = partial(x, y, r, counts) / out.dyG;
    counts[n] = 0;
    out.A.resize(static_cast<std::size_t>(n) * n);
    out.dxF.resize(static_cast<std::size_t>(n) * n);
    out.C.resize(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) {
        counts[c] = 1;
        for (int r = 0; r < n; ++r) {
            const double d = partial(x, y, r, counts);
            out.dxF[static_cast<std::size_t>(r) * n + c] = d;
            out.A[static_cast<std::size_t>(r) * n + c] = d / out.dyG;
        }
        out.C[c] = partial(x, y, n, counts) / out.dyG;
        counts[c] = 0;
    }
    return out;
}

std::vector<MLMap> LorenzMap::eval_DT_jet(std::span<const double> x, double y, int order) const {
    if (order < 0 || order > spec_.k + 1 || order > kMaxOrder)
        throw Error(ErrorCode::OrderUnsupported, "eval_DT_jet order must lie in [0, k + 1]");
    side_for(y);
    const int n = spec_.n;
    const int d = n + 1;
    std::vector<MLMap> jets;
    jets.reserve(static_cast<std::size_t>(order + 1));
    std::vector<int> idx, counts(static_cast<std::size_t>(d));
    for (int j = 0; j <= order; ++j) {
        MLMap level(j, d, d);
        idx.assign(static_cast<std::size_t>(j), 0);
        for (std::size_t t = 0; t < level.tuple_count(); ++t) {
            decode_tuple(t, j, d, idx);
            std::fill(counts.begin(), counts.end(), 0);
            for (int i : idx) ++counts[i];
            auto s = level.slice(t);
            for (int r = 0; r < d; ++r) s[r] = partial(x, y, r, counts);
        }
        jets.push_back(std::move(level));
    }
    return jets;
}

ABCJets LorenzMap::eval_ABC_jets(std::span<const double> x, double y, int order) const {
    const int n = spec_.n;
    const int d = n + 1;
    const auto T = eval_DT_jet(x, y, order + 1);
    const ABC base = eval_ABC(x, y);

    // Jets of the first partials, read off D^{j+1} T with the extra slot first.
    std::vector<MLMap> Fx, Fy, Gx, Gy;
    std::vector<int> idx, full;
    for (int j = 0; j <= order; ++j) {
        MLMap fx(j, d, n * n), fy(j, d, n), gx(j, d, n), gy(j, d, 1);
        idx.assign(static_cast<std::size_t>(j), 0);
        full.assign(static_cast<std::size_t>(j + 1), 0);
        for (std::size_t t = 0; t < fx.tuple_count(); ++t) {
            decode_tuple(t, j, d, idx);
            std::copy(idx.begin(), idx.end(), full.begin() + 1);
            for (int c = 0; c < d; ++c) {
                full[0] = c;
                for (int r = 0; r < n; ++r) {
                    const double v = T[j + 1].at(full, r);
                    if (c < n)
                        fx.slice(t)[static_cast<std::size_t>(r) * n + c] = v;
                    else
                        fy.slice(t)[r] = v;
                }
                const double g = T[j + 1].at(full, n);
                if (c < n)
                    gx.slice(t)[c] = g;
                else
                    gy.slice(t)[0] = g;
            }
        }
        Fx.push_back(std::move(fx));
        Fy.push_back(std::move(fy));
        Gx.push_back(std::move(gx));
        Gy.push_back(std::move(gy));
    }
    const auto inv = reciprocal_jets(Gy, order);

    ABCJets out;
    out.A.push_back(MLMap(0, d, n * n, base.A));
    out.B.push_back(MLMap(0, d, n, base.B));
    out.C.push_back(MLMap(0, d, n, base.C));
    const Bilinear mat = Bilinear::vector_times_scalar(n * n);
    const Bilinear vec = Bilinear::vector_times_scalar(n);
    for (int j = 1; j <= order; ++j) {
        out.A.push_back(leibniz(mat, Fx, inv, j));
        out.B.push_back(leibniz(vec, Fy, inv, j));
        out.C.push_back(leibniz(vec, Gx, inv, j));
    }
    return out;
}

L1Report verify_L1_decay(const MapSpec& spec, std::span<const std::vector<double>> xs, std::span<const double> ys) {
    L1Report report;
    const int n = spec.n;
    const int top = spec.k + 1;
    for (int l = 0; l <= top; ++l)
        for (int m = 0; l + m <= top; ++m) report.ratios.push_back({l, m, 0.0});

    // Group terms by (family, side, component) so each perturbation function
    // is differentiated as a whole.
    struct Group {
        char side;
        std::vector<RawTerm> terms;
    };
    std::vector<Group> groups;
    auto add = [&](const std::vector<PerturbationTerm>& family, int components) {
        for (char side : {'+', '-'})
            for (int c = 0; c < components; ++c) {
                Group g{side, {}};
                for (const auto& t : family)
                    if (t.side == side && t.component == c)
                        for (const auto& mono : t.monomials) g.terms.push_back({mono.coef, &mono.powers, spec.gamma + t.e});
                if (!g.terms.empty()) groups.push_back(std::move(g));
            }
    };
    add(spec.phi_coeffs, n);
    add(spec.psi_coeffs, 1);

    std::vector<std::vector<int>> alphas;
    for (std::size_t s = 0; s < ys.size(); ++s) {
        const double y = ys[s];
        if (y == 0.0) continue;
        const char side = y > 0 ? '+' : '-';
        for (auto& entry : report.ratios) {
            alphas.clear();
            multi_indices(n, entry.l, alphas);
            const double scale = std::pow(std::abs(y), spec.gamma - entry.m);
            for (const auto& g : groups) {
                if (g.side != side) continue;
                for (const auto& x : xs)
                    for (const auto& a : alphas) {
                        double v = 0.0;
                        for (const auto& t : g.terms) v += raw_partial(t, x, y, a, entry.m);
                        entry.worst = std::max(entry.worst, std::abs(v) / scale);
                    }
            }
        }
    }
    for (const auto& entry : report.ratios) report.worst = std::max(report.worst, entry.worst);
    report.pass = report.worst <= spec.K;
    return report;
}

} // namespace folcomp
