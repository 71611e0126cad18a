#include "folcomp/jet_transform.hpp"

#include <algorithm>
#include <cmath>

#include "folcomp/error.hpp"
#include "folcomp/parallel.hpp"

namespace folcomp {

MLMap JetField::value(int j, std::size_t node) const {
    const int n = nu.grid().n();
    const auto src = j == 0 ? nu.value(node) : levels[static_cast<std::size_t>(j) - 1].at(node);
    return MLMap(j, n + 1, n, std::vector<double>(src.begin(), src.end()));
}

void JetField::set(int j, std::size_t node, const MLMap& m) {
    auto dst = j == 0 ? nu.value(node) : levels[static_cast<std::size_t>(j) - 1].at(node);
    std::copy(m.coeffs().begin(), m.coeffs().end(), dst.begin());
}

JetField zero_jets(const Grid& grid, double L_bound, int order) {
    if (order < 0 || order > kMaxOrder) throw Error(ErrorCode::OrderUnsupported, "jet order out of range");
    JetField jets;
    jets.nu = Field(grid, L_bound);
    const int n = grid.n();
    for (int j = 1; j <= order; ++j)
        jets.levels.emplace_back(grid, static_cast<int>(ipow(static_cast<std::size_t>(n + 1), j)) * n);
    return jets;
}

std::string to_string(JetMode mode) {
    switch (mode) {
    case JetMode::exact: return "exact";
    case JetMode::fd: return "fd";
    case JetMode::automatic: return "auto";
    }
    return "auto";
}

JetMode parse_jet_mode(const std::string& s) {
    if (s == "exact") return JetMode::exact;
    if (s == "fd") return JetMode::fd;
    if (s == "auto") return JetMode::automatic;
    throw Error(ErrorCode::ConfigError, "jets.mode must be one of exact, fd, auto");
}

PointJets point_jets(const LorenzMap& map, std::span<const double> x, double y, int order) {
    PointJets pj;
    pj.T = map.eval_DT_jet(x, y, order);
    pj.abc = map.eval_ABC_jets(x, y, order);
    return pj;
}

MLMap PsiParts::total() const { return U1 + U2 + U3; }

PsiParts psi_parts(const PointJets& jets, std::span<const MLMap> nu, int i) {
    if (i < 1 || static_cast<int>(nu.size()) <= i || static_cast<int>(jets.T.size()) <= i ||
        static_cast<int>(jets.abc.B.size()) <= i)
        throw Error(ErrorCode::OrderMismatch, "psi: jets incomplete for the requested order");
    const int n = jets.abc.B[0].out();
    const int d = n + 1;
    const Bilinear rtm = Bilinear::row_times_matrix(n);
    const Bilinear rtc = Bilinear::row_times_column(n);
    const Bilinear vts = Bilinear::vector_times_scalar(n);
    const auto& A = jets.abc.A;
    const auto& B = jets.abc.B;
    const auto& C = jets.abc.C;

    // Jets of the numerator nu(T) A - C.
    std::vector<MLMap> N(static_cast<std::size_t>(i + 1));
    N[0] = phi_product(rtm, nu[0], A[0]) - C[0];
    for (int q = 1; q <= i; ++q) N[q] = dcp_product(nu, jets.T, A, rtm, q, 0, q) - C[q];

    // Jets of (1 - nu(T) B)^{-1}.
    const double denom = 1.0 - phi_product(rtc, nu[0], B[0]).coeffs()[0];
    if (!(std::abs(denom) >= 1e-9)) throw Error(ErrorCode::DenominatorBreach, "|1 - nu(T) B| below 1e-9");
    std::vector<MLMap> I(static_cast<std::size_t>(i + 1));
    I[0] = MLMap::scalar(1.0 / denom, d);
    for (int r = 1; r <= i; ++r) I[r] = dicp_inverse(nu, jets.T, B, rtc, r, 1, r, denom);

    PsiParts parts;
    parts.U1 = leibniz(vts, N, I, i, 0, 0);
    parts.U2 = leibniz(vts, N, I, i, i, i);
    parts.U3 = i >= 2 ? leibniz(vts, N, I, i, 1, i - 1) : MLMap(i, d, n);
    return parts;
}

MLMap psi_at(const PointJets& jets, std::span<const MLMap> nu_at_image, int i) {
    return symmetrize(psi_parts(jets, nu_at_image, i).total());
}

std::vector<double> FiberResult::observed_ratios() const {
    const std::size_t levels = history.empty() ? 0 : history.front().adapted.size();
    std::vector<double> ratios(levels, 0.0);
    for (std::size_t j = 0; j < levels; ++j)
        for (std::size_t m = 1; m + 1 < history.size(); ++m) {
            const double a = history[m].adapted[j];
            if (a < 1e-14) break;
            ratios[j] = std::max(ratios[j], history[m + 1].adapted[j] / a);
        }
    return ratios;
}

JetTransform::JetTransform(const GraphTransform& gt, int order, JetMode mode) : gt_(&gt), order_(order) {
    const int k = gt.map().spec().k;
    if (order < 0 || order > k)
        throw Error(ErrorCode::OrderUnsupported,
                    "jet order " + std::to_string(order) + " exceeds the smoothness order k = " + std::to_string(k));
    switch (mode) {
    case JetMode::exact: exact_ = order; break;
    case JetMode::fd: exact_ = 0; break;
    case JetMode::automatic: exact_ = std::min(order, 2); break;
    }
    const Grid& grid = gt.grid();
    cache_.resize(grid.node_count());
    if (exact_ == 0) return;
    parallel_for(cache_.size(), [&](std::size_t i) {
        if (!gt.node(i).active) return;
        cache_[i] = point_jets(gt.map(), grid.x_of(i), grid.y_of(i), exact_);
    });
}

NodeData JetTransform::psi_apply(const JetField& jets, int i) const {
    if (i < 1 || i > exact_ || jets.order() < i)
        throw Error(ErrorCode::OrderUnsupported, "psi_apply: order outside the exact range");
    const Grid& grid = gt_->grid();
    const int n = grid.n();
    const int d = n + 1;
    NodeData out(grid, static_cast<int>(ipow(static_cast<std::size_t>(d), i)) * n);
    parallel_for(grid.node_count(), [&](std::size_t node) {
        const auto& gn = gt_->node(node);
        if (!gn.active) return;
        std::vector<MLMap> nu;
        nu.reserve(static_cast<std::size_t>(i + 1));
        for (int j = 0; j <= i; ++j) {
            const NodeData& src = j == 0 ? jets.nu.data : jets.levels[static_cast<std::size_t>(j) - 1];
            std::vector<double> v(static_cast<std::size_t>(src.width));
            interpolate(src, gn.stencil, v);
            if (j == 0) {
                const double nv = row_norm(v);
                if (nv > jets.nu.L_bound)
                    for (double& c : v) c *= jets.nu.L_bound / nv;
            }
            nu.emplace_back(j, d, n, std::move(v));
        }
        const MLMap value = psi_at(cache_[node], nu, i);
        std::copy(value.coeffs().begin(), value.coeffs().end(), out.at(node).begin());
    });
    return out;
}

JetField JetTransform::step(const JetField& jets) const {
    if (jets.order() != order_) throw Error(ErrorCode::OrderMismatch, "jet state order differs from the transform");
    JetField next;
    next.nu = gt_->apply(jets.nu);
    next.levels.resize(static_cast<std::size_t>(order_));
    for (int j = 1; j <= order_; ++j) {
        if (j <= exact_)
            next.levels[j - 1] = psi_apply(jets, j);
        else
            next.levels[j - 1] = grid_derivative(j == 1 ? next.nu.data : next.levels[j - 2], j - 1, gt_->grid().n());
    }
    return next;
}

FiberResult JetTransform::iterate(const JetField& seed, double tol, int max_iter, std::span<const PerronData> perron,
                                  NormKind kind) const {
    if (static_cast<int>(perron.size()) < order_)
        throw Error(ErrorCode::OrderMismatch, "Perron data missing for some jet level");
    FiberResult r;
    r.exact_order = exact_;
    r.jets = seed;
    const Grid& grid = gt_->grid();
    for (int it = 1; it <= max_iter; ++it) {
        JetField next = step(r.jets);
        FiberStep st;
        st.adapted.push_back(0.0);
        st.max_coeff.push_back(sup_distance(next.nu.data, r.jets.nu.data));
        for (std::size_t node = 0; node < grid.node_count(); ++node) {
            std::vector<double> diff(next.nu.value(node).begin(), next.nu.value(node).end());
            for (std::size_t c = 0; c < diff.size(); ++c) diff[c] -= r.jets.nu.value(node)[c];
            st.adapted[0] = std::max(st.adapted[0], row_norm(diff));
        }
        for (int j = 1; j <= order_; ++j) {
            const double dist = parallel_max(grid.node_count(), [&](std::size_t node) {
                return adapted_norm(next.value(j, node) - r.jets.value(j, node), perron[j - 1], kind);
            });
            st.adapted.push_back(dist);
            st.max_coeff.push_back(sup_distance(next.levels[j - 1], r.jets.levels[j - 1]));
        }
        r.jets = std::move(next);
        r.iterations = it;
        const bool done = std::all_of(st.adapted.begin(), st.adapted.end(), [&](double v) { return v <= tol; });
        r.history.push_back(std::move(st));
        if (done) {
            r.converged = true;
            break;
        }
    }
    return r;
}

FiberResult fiber_iterate(const JetTransform& jt, const JetField& seed, double tol, int max_iter,
                          std::span<const PerronData> perron, NormKind kind) {
    FiberResult r = jt.iterate(seed, tol, max_iter, perron, kind);
    if (!r.converged) {
        std::string ratios;
        for (double q : r.observed_ratios()) ratios += (ratios.empty() ? "" : ", ") + std::to_string(q);
        throw Error(ErrorCode::NoConvergence, "fiber iteration did not reach tol " + std::to_string(tol) + " in " +
                                                  std::to_string(max_iter) + " steps (per-level ratios " + ratios + ")");
    }
    return r;
}

namespace {

// Weights of the three-point first-derivative formula at nodes[i].
void derivative_weights(const std::vector<double>& nodes, std::size_t i, std::size_t idx[3], double w[3]) {
    const std::size_t last = nodes.size() - 1;
    if (nodes.size() == 2) {
        const double h = nodes[1] - nodes[0];
        idx[0] = 0;
        idx[1] = 1;
        idx[2] = 1;
        w[0] = -1.0 / h;
        w[1] = 1.0 / h;
        w[2] = 0.0;
        return;
    }
    if (i == 0) {
        const double h1 = nodes[1] - nodes[0], h2 = nodes[2] - nodes[1];
        idx[0] = 0;
        idx[1] = 1;
        idx[2] = 2;
        w[0] = -(2 * h1 + h2) / (h1 * (h1 + h2));
        w[1] = (h1 + h2) / (h1 * h2);
        w[2] = -h1 / (h2 * (h1 + h2));
    } else if (i == last) {
        const double h1 = nodes[last] - nodes[last - 1], h2 = nodes[last - 1] - nodes[last - 2];
        idx[0] = last;
        idx[1] = last - 1;
        idx[2] = last - 2;
        w[0] = (2 * h1 + h2) / (h1 * (h1 + h2));
        w[1] = -(h1 + h2) / (h1 * h2);
        w[2] = h1 / (h2 * (h1 + h2));
    } else {
        const double h1 = nodes[i] - nodes[i - 1], h2 = nodes[i + 1] - nodes[i];
        idx[0] = i - 1;
        idx[1] = i;
        idx[2] = i + 1;
        w[0] = -h2 / (h1 * (h1 + h2));
        w[1] = (h2 - h1) / (h1 * h2);
        w[2] = h1 / (h2 * (h1 + h2));
    }
}

} // namespace

NodeData grid_derivative(const NodeData& level, int j, int n) {
    const Grid& grid = level.grid;
    const int d = n + 1;
    const std::size_t in_tuples = ipow(static_cast<std::size_t>(d), j);
    if (level.width != static_cast<int>(in_tuples) * n)
        throw Error(ErrorCode::OrderMismatch, "grid_derivative: width does not match the level order");
    NodeData out(grid, static_cast<int>(in_tuples) * d * n);
    const std::size_t xres = static_cast<std::size_t>(grid.x_resolution());
    const std::size_t ny = grid.y_count();

    parallel_for(grid.node_count(), [&](std::size_t node) {
        if (grid.y_of(node) == 0.0) return;
        MLMap deriv(j + 1, d, n);
        std::size_t flat = grid.x_flat(node);
        std::vector<std::size_t> ix(static_cast<std::size_t>(n));
        for (int a = n - 1; a >= 0; --a) {
            ix[a] = flat % xres;
            flat /= xres;
        }
        for (int a = 0; a <= n; ++a) {
            std::size_t idx[3];
            double w[3];
            std::size_t stride;
            if (a < n) {
                derivative_weights(grid.x_nodes(), ix[a], idx, w);
                stride = ipow(xres, n - 1 - a) * ny;
            } else {
                derivative_weights(grid.y_nodes(), grid.y_index(node), idx, w);
                stride = 1;
            }
            const std::size_t pos = a < n ? ix[a] : grid.y_index(node);
            for (int s = 0; s < 3; ++s) {
                if (w[s] == 0.0) continue;
                const std::size_t other = node + idx[s] * stride - pos * stride;
                const auto v = level.at(other);
                for (std::size_t t = 0; t < in_tuples; ++t)
                    for (int r = 0; r < n; ++r)
                        deriv.coeffs()[(t * d + a) * n + r] += w[s] * v[t * n + r];
            }
        }
        const MLMap sym = symmetrize(deriv);
        std::copy(sym.coeffs().begin(), sym.coeffs().end(), out.at(node).begin());
    });
    return out;
}

std::vector<VanishingLevel> verify_vanishing(const JetField& jets, std::span<const PerronData> perron, double tol,
                                             NormKind kind) {
    std::vector<VanishingLevel> report;
    const Grid& grid = jets.nu.grid();
    for (int j = 1; j <= jets.order(); ++j) {
        VanishingLevel v;
        v.level = j;
        v.deltas = {0.1, 0.01, 0.001};
        std::vector<double> norms(grid.node_count(), 0.0);
        parallel_for(grid.node_count(), [&](std::size_t node) {
            if (std::abs(grid.y_of(node)) <= v.deltas.front())
                norms[node] = adapted_norm(jets.value(j, node), perron[j - 1], kind);
        });
        for (double delta : v.deltas) {
            double m = 0.0;
            for (std::size_t node = 0; node < grid.node_count(); ++node)
                if (std::abs(grid.y_of(node)) <= delta) m = std::max(m, norms[node]);
            v.maxima.push_back(m);
        }
        v.monotone = true;
        for (std::size_t s = 1; s < v.maxima.size(); ++s) {
            const double prev = v.maxima[s - 1], cur = v.maxima[s];
            if (cur > prev || (prev > 0.0 && cur >= prev)) v.monotone = false;
        }
        v.below_tolerance = v.maxima.back() <= 10.0 * tol;

        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int count = 0;
        for (std::size_t s = 0; s < v.maxima.size(); ++s) {
            if (v.maxima[s] <= 0.0) continue;
            const double lx = std::log(v.deltas[s]), ly = std::log(v.maxima[s]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++count;
        }
        v.slope = count >= 2 ? (count * sxy - sx * sy) / (count * sxx - sx * sx) : 0.0;
        report.push_back(std::move(v));
    }
    return report;
}

} // namespace folcomp
