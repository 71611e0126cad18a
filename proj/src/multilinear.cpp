#include "folcomp/multilinear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "folcomp/error.hpp"

namespace folcomp {

namespace {

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

void check_order(int order) {
    if (order < 0 || order > kMaxOrder)
        throw Error(ErrorCode::OrderUnsupported,
                    "multilinear order " + std::to_string(order) + " outside [0, " +
                        std::to_string(kMaxOrder) + "]");
}

// Position permutations of {0..k-1}, in lexicographic order.
const std::vector<std::vector<int>>& permutations(int k) {
    static const auto table = [] {
        std::vector<std::vector<std::vector<int>>> t(kMaxOrder + 1);
        for (int m = 0; m <= kMaxOrder; ++m) {
            std::vector<int> p(m);
            std::iota(p.begin(), p.end(), 0);
            do {
                t[m].push_back(p);
            } while (std::next_permutation(p.begin(), p.end()));
        }
        return t;
    }();
    return table[k];
}

std::size_t encode_tuple(std::span<const int> indices, int dim) {
    std::size_t t = 0;
    for (int j : indices) t = t * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j);
    return t;
}

} // namespace

std::size_t ipow(std::size_t base, int exponent) {
    std::size_t r = 1;
    for (int i = 0; i < exponent; ++i) r *= base;
    return r;
}

void decode_tuple(std::size_t tuple, int order, int dim, std::span<int> indices) {
    for (int m = order - 1; m >= 0; --m) {
        indices[m] = static_cast<int>(tuple % static_cast<std::size_t>(dim));
        tuple /= static_cast<std::size_t>(dim);
    }
}

// ---------------------------------------------------------------------------
// MLMap

MLMap::MLMap(int order, int dim, int out) : order_(order), dim_(dim), out_(out) {
    check_order(order);
    if (dim < 1 || out < 1) throw Error(ErrorCode::OrderMismatch, "MLMap needs dim >= 1 and out >= 1");
    coeffs_.assign(ipow(static_cast<std::size_t>(dim), order) * static_cast<std::size_t>(out), 0.0);
}

MLMap::MLMap(int order, int dim, int out, std::vector<double> coeffs) : MLMap(order, dim, out) {
    if (coeffs.size() != coeffs_.size())
        throw Error(ErrorCode::OrderMismatch, "coefficient count does not match MLMap shape");
    coeffs_ = std::move(coeffs);
}

MLMap MLMap::constant(std::span<const double> value, int dim) {
    return MLMap(0, dim, static_cast<int>(value.size()), std::vector<double>(value.begin(), value.end()));
}

MLMap MLMap::scalar(double value, int dim) { return MLMap(0, dim, 1, {value}); }

double MLMap::at(std::span<const int> indices, int r) const {
    return coeffs_[encode_tuple(indices, dim_) * static_cast<std::size_t>(out_) + static_cast<std::size_t>(r)];
}

double& MLMap::at(std::span<const int> indices, int r) {
    return coeffs_[encode_tuple(indices, dim_) * static_cast<std::size_t>(out_) + static_cast<std::size_t>(r)];
}

std::span<const double> MLMap::slice(std::size_t tuple) const {
    return std::span<const double>(coeffs_).subspan(tuple * static_cast<std::size_t>(out_),
                                                    static_cast<std::size_t>(out_));
}

std::span<double> MLMap::slice(std::size_t tuple) {
    return std::span<double>(coeffs_).subspan(tuple * static_cast<std::size_t>(out_),
                                              static_cast<std::size_t>(out_));
}

std::vector<double> MLMap::apply(std::span<const std::vector<double>> args) const {
    if (static_cast<int>(args.size()) != order_)
        throw Error(ErrorCode::OrderMismatch, "apply: wrong number of arguments");
    for (const auto& a : args)
        if (static_cast<int>(a.size()) != dim_)
            throw Error(ErrorCode::OrderMismatch, "apply: argument length differs from dim");
    std::vector<double> result(static_cast<std::size_t>(out_), 0.0);
    std::vector<int> idx(static_cast<std::size_t>(order_));
    for (std::size_t t = 0; t < tuple_count(); ++t) {
        decode_tuple(t, order_, dim_, idx);
        double w = 1.0;
        for (int m = 0; m < order_; ++m) w *= args[m][idx[m]];
        if (w == 0.0) continue;
        auto s = slice(t);
        for (int r = 0; r < out_; ++r) result[r] += w * s[r];
    }
    return result;
}

bool MLMap::same_shape(const MLMap& other) const {
    return order_ == other.order_ && dim_ == other.dim_ && out_ == other.out_;
}

MLMap& MLMap::operator+=(const MLMap& other) {
    if (!same_shape(other)) throw Error(ErrorCode::OrderMismatch, "MLMap shapes differ in +=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

MLMap& MLMap::operator-=(const MLMap& other) {
    if (!same_shape(other)) throw Error(ErrorCode::OrderMismatch, "MLMap shapes differ in -=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
}

MLMap& MLMap::operator*=(double s) {
    for (double& c : coeffs_) c *= s;
    return *this;
}

double MLMap::max_abs() const {
    double m = 0.0;
    for (double c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

// ---------------------------------------------------------------------------
// Symmetrizing operator

MLMap symmetrize(const MLMap& b) {
    const int k = b.order();
    if (k <= 1) return b;
    const int d = b.dim();
    const int out = b.out();
    const auto& perms = permutations(k);
    const double norm = factorial(k);

    MLMap result(k, d, out);
    std::vector<int> idx(k), sorted(k), permuted(k);
    std::vector<char> done(b.tuple_count(), 0);
    std::vector<std::size_t> orbit;
    std::vector<double> value(static_cast<std::size_t>(out));

    for (std::size_t t = 0; t < b.tuple_count(); ++t) {
        if (done[t]) continue;
        decode_tuple(t, k, d, idx);
        sorted = idx;
        std::sort(sorted.begin(), sorted.end());

        // Orbit of the canonical tuple, in a fixed order.
        orbit.clear();
        for (const auto& p : perms) {
            for (int m = 0; m < k; ++m) permuted[m] = sorted[p[m]];
            orbit.push_back(encode_tuple(permuted, d));
        }

        // Already-symmetric input is returned unchanged, so Sym o Sym = Sym
        // holds exactly rather than to rounding.
        bool constant = true;
        for (std::size_t o : orbit) {
            auto s = b.slice(o);
            auto s0 = b.slice(orbit.front());
            if (!std::equal(s.begin(), s.end(), s0.begin())) {
                constant = false;
                break;
            }
        }
        if (constant) {
            auto s0 = b.slice(orbit.front());
            std::copy(s0.begin(), s0.end(), value.begin());
        } else {
            std::fill(value.begin(), value.end(), 0.0);
            for (std::size_t o : orbit) {
                auto s = b.slice(o);
                for (int r = 0; r < out; ++r) value[r] += s[r];
            }
            for (double& v : value) v /= norm;
        }
        for (std::size_t o : orbit) {
            auto dst = result.slice(o);
            std::copy(value.begin(), value.end(), dst.begin());
            done[o] = 1;
        }
    }
    return result;
}

bool is_symmetric(const MLMap& b, double tol) {
    const int k = b.order();
    if (k <= 1) return true;
    std::vector<int> idx(k), permuted(k);
    for (std::size_t t = 0; t < b.tuple_count(); ++t) {
        decode_tuple(t, k, b.dim(), idx);
        for (const auto& p : permutations(k)) {
            for (int m = 0; m < k; ++m) permuted[m] = idx[p[m]];
            auto a = b.slice(t);
            auto c = b.slice(encode_tuple(permuted, b.dim()));
            for (int r = 0; r < b.out(); ++r)
                if (std::abs(a[r] - c[r]) > tol) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Bilinear forms

void Bilinear::apply(std::span<const double> a, std::span<const double> b, std::span<double> result) const {
    for (int o = 0; o < out; ++o) {
        double acc = 0.0;
        for (int i = 0; i < left; ++i) {
            if (a[i] == 0.0) continue;
            const double* row = &coef[(static_cast<std::size_t>(o) * left + i) * right];
            for (int j = 0; j < right; ++j) acc += row[j] * a[i] * b[j];
        }
        result[o] = acc;
    }
}

Bilinear Bilinear::row_times_column(int n) {
    Bilinear f{n, n, 1, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
    for (int i = 0; i < n; ++i) f.coef[static_cast<std::size_t>(i) * n + i] = 1.0;
    return f;
}

Bilinear Bilinear::row_times_matrix(int n) {
    // out_c = sum_r a_r M[r][c], M stored row-major at r * n + c.
    const int m = n * n;
    Bilinear f{n, m, n, std::vector<double>(static_cast<std::size_t>(n) * n * m, 0.0)};
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) f.coef[(static_cast<std::size_t>(c) * n + r) * m + r * n + c] = 1.0;
    return f;
}

Bilinear Bilinear::vector_times_scalar(int m) {
    Bilinear f{m, 1, m, std::vector<double>(static_cast<std::size_t>(m) * m, 0.0)};
    for (int o = 0; o < m; ++o) f.coef[static_cast<std::size_t>(o) * m + o] = 1.0;
    return f;
}

// ---------------------------------------------------------------------------
// Products and compositions

MLMap phi_product(const Bilinear& form, const MLMap& a, const MLMap& b) {
    if (a.out() != form.left || b.out() != form.right)
        throw Error(ErrorCode::OrderMismatch, "phi_product: operand codomains do not match the form");
    if (a.order() > 0 && b.order() > 0 && a.dim() != b.dim())
        throw Error(ErrorCode::OrderMismatch, "phi_product: operand domains differ");
    const int dim = a.order() > 0 ? a.dim() : b.dim();
    MLMap result(a.order() + b.order(), dim, form.out);
    const std::size_t nb = b.tuple_count();
    for (std::size_t ta = 0; ta < a.tuple_count(); ++ta)
        for (std::size_t tb = 0; tb < nb; ++tb) form.apply(a.slice(ta), b.slice(tb), result.slice(ta * nb + tb));
    return result;
}

MLMap phi_compose(const MLMap& outer, std::span<const MLMap> inner) {
    const int q = outer.order();
    if (static_cast<int>(inner.size()) != q)
        throw Error(ErrorCode::OrderMismatch, "phi_compose: need one inner map per outer slot");
    if (q == 0) return outer;
    const int d = inner.front().dim();
    int k = 0;
    for (const auto& m : inner) {
        if (m.out() != outer.dim() || m.dim() != d)
            throw Error(ErrorCode::OrderMismatch, "phi_compose: inner map shape mismatch");
        k += m.order();
    }
    MLMap result(k, d, outer.out());
    const int dp = outer.dim();
    const std::size_t outer_tuples = outer.tuple_count();
    std::vector<std::size_t> block_tuple(static_cast<std::size_t>(q));
    std::vector<std::size_t> block_size(static_cast<std::size_t>(q));
    for (int j = 0; j < q; ++j) block_size[j] = ipow(static_cast<std::size_t>(d), inner[j].order());
    std::vector<int> sidx(static_cast<std::size_t>(q));

    for (std::size_t t = 0; t < result.tuple_count(); ++t) {
        std::size_t rest = t;
        for (int j = q - 1; j >= 0; --j) {
            block_tuple[j] = rest % block_size[j];
            rest /= block_size[j];
        }
        auto dst = result.slice(t);
        for (std::size_t s = 0; s < outer_tuples; ++s) {
            decode_tuple(s, q, dp, sidx);
            double w = 1.0;
            for (int j = 0; j < q && w != 0.0; ++j) w *= inner[j].slice(block_tuple[j])[sidx[j]];
            if (w == 0.0) continue;
            auto src = outer.slice(s);
            for (int r = 0; r < outer.out(); ++r) dst[r] += w * src[r];
        }
    }
    return result;
}

std::vector<std::vector<int>> compositions(int k, int q) {
    std::vector<std::vector<int>> out;
    if (q <= 0 || k < q) return out;
    std::vector<int> current;
    auto rec = [&](auto&& self, int remaining, int parts) -> void {
        if (parts == 1) {
            current.push_back(remaining);
            out.push_back(current);
            current.pop_back();
            return;
        }
        for (int r = 1; r <= remaining - (parts - 1); ++r) {
            current.push_back(r);
            self(self, remaining - r, parts - 1);
            current.pop_back();
        }
    };
    rec(rec, k, q);
    return out;
}

MLMap dc_compose(std::span<const MLMap> outer_jets, std::span<const MLMap> inner_jets, int k1, int k2,
                 int k3) {
    if (k1 == 0) {
        if (outer_jets.empty()) throw Error(ErrorCode::OrderMismatch, "dc_compose: missing value level");
        return outer_jets[0];
    }
    if (!(k1 >= k3 && k2 >= 1) || static_cast<int>(outer_jets.size()) <= std::max(k3, 0))
        throw Error(ErrorCode::OrderMismatch, "dc_compose: incomplete outer jets or bad order triple");
    const int max_inner = k1 - k2 + 1;
    if (static_cast<int>(inner_jets.size()) <= std::min(max_inner, k1))
        throw Error(ErrorCode::OrderMismatch, "dc_compose: incomplete inner jets");

    const int d = inner_jets[1].dim();
    MLMap sum(k1, d, outer_jets[std::clamp(k2, 0, static_cast<int>(outer_jets.size()) - 1)].out());
    std::vector<MLMap> args;
    for (int q = k2; q <= k3; ++q) {
        const MLMap& outer = outer_jets[q];
        if (outer.order() != q) throw Error(ErrorCode::OrderMismatch, "dc_compose: outer level has wrong order");
        for (const auto& r : compositions(k1, q)) {
            double coeff = factorial(k1) / factorial(q);
            args.clear();
            for (int rj : r) {
                coeff /= factorial(rj);
                args.push_back(inner_jets[rj]);
            }
            sum += phi_compose(outer, args) * coeff;
        }
    }
    return symmetrize(sum);
}

MLMap leibniz(const Bilinear& form, std::span<const MLMap> a_jets, std::span<const MLMap> b_jets, int k,
              int qmin, int qmax) {
    qmin = std::max(qmin, 0);
    qmax = std::min(qmax, k);
    if (static_cast<int>(a_jets.size()) <= qmax || static_cast<int>(b_jets.size()) <= k - qmin)
        throw Error(ErrorCode::OrderMismatch, "leibniz: incomplete jets");
    const int dim = a_jets.empty() ? b_jets.front().dim() : a_jets.front().dim();
    MLMap sum(k, dim, form.out);
    for (int q = qmin; q <= qmax; ++q) sum += phi_product(form, a_jets[q], b_jets[k - q]) * binomial(k, q);
    return symmetrize(sum);
}

MLMap dcp_product(std::span<const MLMap> nu_jets, std::span<const MLMap> f_jets, std::span<const MLMap> b_jets,
                  const Bilinear& form, int k1, int k2, int k3) {
    if (k2 < 0 || k3 > k1 || static_cast<int>(nu_jets.size()) <= k3)
        throw Error(ErrorCode::OrderMismatch, "dcp_product: incomplete nu jets or bad order triple");
    std::vector<MLMap> composite(static_cast<std::size_t>(k1 + 1));
    for (int q = std::max(k2, 0); q <= k3; ++q) {
        if (q == 0) {
            MLMap v = nu_jets[0];
            composite[0] = MLMap(0, f_jets.size() > 1 ? f_jets[1].dim() : v.dim(), v.out(),
                                 std::vector<double>(v.coeffs().begin(), v.coeffs().end()));
        } else {
            composite[q] = dc_compose(nu_jets, f_jets, q, 1, q);
        }
    }
    // Unused levels only need a well-formed shape.
    for (int q = 0; q <= k1; ++q)
        if (q < k2 || q > k3) composite[q] = MLMap(q, b_jets.front().dim(), form.left);
    return leibniz(form, composite, b_jets, k1, k2, k3);
}

MLMap dicp_inverse(std::span<const MLMap> nu_jets, std::span<const MLMap> f_jets, std::span<const MLMap> b_jets,
                   const Bilinear& form, int k1, int k2, int k3, double denom) {
    if (std::abs(denom) < 1e-9)
        throw Error(ErrorCode::NearSingularDenominator, "|1 - nu o T B| below 1e-9");
    if (form.out != 1) throw Error(ErrorCode::OrderMismatch, "dicp_inverse needs a scalar-valued pairing");
    if (k1 < 1 || k2 < 1 || k3 > k1)
        throw Error(ErrorCode::OrderMismatch, "dicp_inverse: bad order triple");
    const int max_part = k1 - k2 + 1;
    const int dim = b_jets.front().dim();
    // Jets of g = (nu o f) B.
    std::vector<MLMap> g(static_cast<std::size_t>(k1 + 1));
    g[0] = MLMap(0, dim, 1);
    for (int r = 1; r <= k1; ++r)
        g[r] = r <= max_part ? dcp_product(nu_jets, f_jets, b_jets, form, r, 0, r) : MLMap(r, dim, 1);
    // Derivatives of u -> 1/(1-u) at u = 1 - denom, scaled: q! denom^{-(q+1)}.
    std::vector<MLMap> outer(static_cast<std::size_t>(k3 + 1));
    for (int q = 0; q <= k3; ++q) {
        outer[q] = MLMap(q, 1, 1);
        outer[q].coeffs()[0] = factorial(q) * std::pow(denom, -(q + 1));
    }
    return dc_compose(outer, g, k1, k2, k3);
}

std::vector<MLMap> reciprocal_jets(std::span<const MLMap> g_jets, int order) {
    if (g_jets.empty() || g_jets[0].out() != 1 || static_cast<int>(g_jets.size()) <= order)
        throw Error(ErrorCode::OrderMismatch, "reciprocal_jets: need scalar jets through the order");
    const double g0 = g_jets[0].coeffs()[0];
    if (g0 == 0.0) throw Error(ErrorCode::NearSingularDenominator, "reciprocal of zero");
    std::vector<MLMap> outer(static_cast<std::size_t>(order + 1));
    for (int q = 0; q <= order; ++q) {
        outer[q] = MLMap(q, 1, 1);
        outer[q].coeffs()[0] = (q % 2 == 0 ? 1.0 : -1.0) * factorial(q) * std::pow(g0, -(q + 1));
    }
    std::vector<MLMap> h(static_cast<std::size_t>(order + 1));
    h[0] = MLMap::scalar(1.0 / g0, g_jets[0].dim());
    for (int k = 1; k <= order; ++k) h[k] = dc_compose(outer, g_jets, k, 1, k);
    return h;
}

MLMap pushforward(const MLMap& b, std::span<const double> mat) {
    const int d = b.dim();
    if (mat.size() != static_cast<std::size_t>(d) * d)
        throw Error(ErrorCode::OrderMismatch, "pushforward: matrix must be dim x dim");
    MLMap current = b;
    const int k = b.order();
    std::vector<int> idx(k);
    // Contract one slot at a time: new[..j..] = sum_i mat[i][j] old[..i..].
    for (int slot = 0; slot < k; ++slot) {
        MLMap next(k, d, b.out());
        for (std::size_t t = 0; t < current.tuple_count(); ++t) {
            decode_tuple(t, k, d, idx);
            auto src = current.slice(t);
            const int i = idx[slot];
            for (int j = 0; j < d; ++j) {
                const double w = mat[static_cast<std::size_t>(i) * d + j];
                if (w == 0.0) continue;
                idx[slot] = j;
                auto dst = next.slice(encode_tuple(idx, d));
                for (int r = 0; r < b.out(); ++r) dst[r] += w * src[r];
            }
            idx[slot] = i;
        }
        current = std::move(next);
    }
    return current;
}

MLMap block(const MLMap& b, unsigned mask) {
    MLMap result(b.order(), b.dim(), b.out());
    std::vector<int> idx(b.order());
    const int f_index = b.dim() - 1;
    for (std::size_t t = 0; t < b.tuple_count(); ++t) {
        decode_tuple(t, b.order(), b.dim(), idx);
        bool keep = true;
        for (int m = 0; m < b.order(); ++m)
            if ((idx[m] == f_index) != (((mask >> m) & 1u) != 0)) {
                keep = false;
                break;
            }
        if (!keep) continue;
        auto src = b.slice(t);
        auto dst = result.slice(t);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return result;
}

double spectral_norm(std::span<const double> mat, int rows, int cols) {
    if (rows == 0 || cols == 0) return 0.0;
    // Gram matrix of the smaller side.
    const bool use_rows = rows <= cols;
    const int m = use_rows ? rows : cols;
    std::vector<double> gram(static_cast<std::size_t>(m) * m, 0.0);
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) {
            double acc = 0.0;
            if (use_rows)
                for (int c = 0; c < cols; ++c)
                    acc += mat[static_cast<std::size_t>(a) * cols + c] * mat[static_cast<std::size_t>(b) * cols + c];
            else
                for (int r = 0; r < rows; ++r)
                    acc += mat[static_cast<std::size_t>(r) * cols + a] * mat[static_cast<std::size_t>(r) * cols + b];
            gram[static_cast<std::size_t>(a) * m + b] = acc;
            gram[static_cast<std::size_t>(b) * m + a] = acc;
        }
    if (m == 1) return std::sqrt(gram[0]);

    // Cyclic Jacobi rotations until the off-diagonal part is negligible.
    auto at = [&](int a, int b) -> double& { return gram[static_cast<std::size_t>(a) * m + b]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0, diag = 0.0;
        for (int a = 0; a < m; ++a) {
            diag += at(a, a) * at(a, a);
            for (int b = a + 1; b < m; ++b) off += at(a, b) * at(a, b);
        }
        if (off <= 1e-32 * diag) break;
        for (int p = 0; p < m; ++p)
            for (int q = p + 1; q < m; ++q) {
                if (at(p, q) == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
                for (int r = 0; r < m; ++r) {
                    const double rp = at(r, p), rq = at(r, q);
                    at(r, p) = c * rp - sn * rq;
                    at(r, q) = sn * rp + c * rq;
                }
                for (int r = 0; r < m; ++r) {
                    const double pr = at(p, r), qr = at(q, r);
                    at(p, r) = c * pr - sn * qr;
                    at(q, r) = sn * pr + c * qr;
                }
            }
    }
    double top = 0.0;
    for (int a = 0; a < m; ++a) top = std::max(top, at(a, a));
    return std::sqrt(top);
}

double block_norm(const MLMap& b, unsigned mask, NormKind kind) {
    const MLMap part = block(b, mask);
    if (kind == NormKind::frobenius) {
        double acc = 0.0;
        for (double c : part.coeffs()) acc += c * c;
        return std::sqrt(acc);
    }
    // Unfolding out x tuples, i.e. the transpose of the storage layout.
    const int rows = part.out();
    const int cols = static_cast<int>(part.tuple_count());
    std::vector<double> unfolded(static_cast<std::size_t>(rows) * cols);
    for (int t = 0; t < cols; ++t)
        for (int r = 0; r < rows; ++r)
            unfolded[static_cast<std::size_t>(r) * cols + t] = part.slice(static_cast<std::size_t>(t))[r];
    return spectral_norm(unfolded, rows, cols);
}

double adapted_norm(const MLMap& b, const PerronData& perron, NormKind kind) {
    if (perron.order != b.order())
        throw Error(ErrorCode::OrderMismatch, "adapted_norm: Perron data order differs from map order");
    double acc = 0.0;
    for (unsigned mask = 0; mask < (1u << b.order()); ++mask)
        acc += perron.weights[mask] * block_norm(b, mask, kind);
    return acc;
}

std::string dump(const MLMap& b) {
    std::ostringstream os;
    os.precision(17);
    os << "order " << b.order() << " dim " << b.dim() << " out " << b.out() << '\n';
    std::vector<int> idx(b.order());
    for (std::size_t t = 0; t < b.tuple_count(); ++t) {
        decode_tuple(t, b.order(), b.dim(), idx);
        for (int r = 0; r < b.out(); ++r) {
            for (int j : idx) os << j << ' ';
            os << ": " << r << " = " << b.slice(t)[r] << '\n';
        }
    }
    return os.str();
}

} // namespace folcomp
