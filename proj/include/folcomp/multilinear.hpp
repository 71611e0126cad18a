#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "folcomp/perron.hpp"

namespace folcomp {

/// Hard cap on supported multilinear orders; dense storage grows as dim^order.
inline constexpr int kMaxOrder = 5;

std::size_t ipow(std::size_t base, int exponent);

/// Dense k-linear map from (R^dim)^k to R^out.
///
/// Coefficient [j1..jk][r] is the value of output r on basis vectors
/// e_{j1},...,e_{jk}. Storage is row-major with j1 most significant and the
/// output index fastest. Order 0 maps are plain vectors (a "value").
class MLMap {
public:
    MLMap() = default;
    MLMap(int order, int dim, int out);
    MLMap(int order, int dim, int out, std::vector<double> coeffs);

    /// Order-0 map holding `value`.
    static MLMap constant(std::span<const double> value, int dim);
    static MLMap scalar(double value, int dim);

    int order() const { return order_; }
    int dim() const { return dim_; }
    int out() const { return out_; }
    std::size_t tuple_count() const { return coeffs_.size() / static_cast<std::size_t>(out_); }

    std::span<const double> coeffs() const { return coeffs_; }
    std::span<double> coeffs() { return coeffs_; }

    double at(std::span<const int> indices, int r) const;
    double& at(std::span<const int> indices, int r);
    /// Output slice for the argument tuple with flat index `tuple`.
    std::span<const double> slice(std::size_t tuple) const;
    std::span<double> slice(std::size_t tuple);

    /// Evaluates the map on `order()` vectors of length dim().
    std::vector<double> apply(std::span<const std::vector<double>> args) const;

    MLMap& operator+=(const MLMap& other);
    MLMap& operator-=(const MLMap& other);
    MLMap& operator*=(double s);
    friend MLMap operator+(MLMap a, const MLMap& b) { return a += b; }
    friend MLMap operator-(MLMap a, const MLMap& b) { return a -= b; }
    friend MLMap operator*(MLMap a, double s) { return a *= s; }
    friend MLMap operator*(double s, MLMap a) { return a *= s; }
    bool operator==(const MLMap& other) const = default;

    /// Max-coefficient norm.
    double max_abs() const;
    bool same_shape(const MLMap& other) const;

private:
    int order_ = 0;
    int dim_ = 1;
    int out_ = 1;
    std::vector<double> coeffs_ = std::vector<double>(1, 0.0);
};

/// Decodes a flat tuple index into argument indices (j1 most significant).
void decode_tuple(std::size_t tuple, int order, int dim, std::span<int> indices);

/// (1/k!) sum over permutations of the argument slots.
MLMap symmetrize(const MLMap& b);
bool is_symmetric(const MLMap& b, double tol = 0.0);

/// A bilinear form B : R^left x R^right -> R^out stored as dense coefficients
/// coef[(o * left + a) * right + b].
struct Bilinear {
    int left = 1;
    int right = 1;
    int out = 1;
    std::vector<double> coef;

    void apply(std::span<const double> a, std::span<const double> b, std::span<double> result) const;

    /// (row in R^n, column in R^n) -> scalar.
    static Bilinear row_times_column(int n);
    /// (row in R^n, n x n matrix row-major) -> row in R^n.
    static Bilinear row_times_matrix(int n);
    /// (vector in R^m, scalar) -> vector in R^m.
    static Bilinear vector_times_scalar(int m);
};

/// phi^{(i,k-i)}(a, b)(e1..ek) = B(a(e1..ei), b(e_{i+1}..ek)); not symmetrized.
MLMap phi_product(const Bilinear& form, const MLMap& a, const MLMap& b);

/// phi^{(q,r1..rq)}(outer, inner_1..inner_q)(e1..ek) =
/// outer(inner_1(e_1..e_{r1}), ..., inner_q(..e_k)) with consecutive argument
/// blocks; each inner map's codomain must be the outer map's domain.
MLMap phi_compose(const MLMap& outer, std::span<const MLMap> inner);

/// Ordered compositions (r1..rq) of k into q positive parts.
std::vector<std::vector<int>> compositions(int k, int q);

/// Generalised higher chain rule. `outer_jets[q]` is the q-th derivative of
/// the outer map at f(p), for every q from 0 through k3;
/// `inner_jets[r]` is D^r f(p) for r >= 1. Returns
///   Sym sum_{q=k2}^{k3} sum_{r1+..+rq=k1} k1!/(q! r1!..rq!) outer_q(D^{r1}f,...,D^{rq}f).
/// With (k1,1,k1) this is D^{k1}(outer o f). The special case k1 = 0 returns
/// outer_jets[0] (plain composition).
MLMap dc_compose(std::span<const MLMap> outer_jets, std::span<const MLMap> inner_jets,
                 int k1, int k2, int k3);

/// Generalised Leibniz rule: Sym sum_{q=qmin}^{qmax} C(k,q) phi^{(q,k-q)}(a_q, b_{k-q}).
MLMap leibniz(const Bilinear& form, std::span<const MLMap> a_jets, std::span<const MLMap> b_jets,
              int k, int qmin, int qmax);
inline MLMap leibniz(const Bilinear& form, std::span<const MLMap> a_jets,
                     std::span<const MLMap> b_jets, int k) {
    return leibniz(form, a_jets, b_jets, k, 0, k);
}

/// Derivative of the product (nu o f) . B:
///   Sym sum_{q=k2}^{k3} C(k1,q) phi^{(q,k1-q)}(DC^{(q,1,q)}(nu, f), D^{k1-q} B).
/// `nu_jets[j]` are the nu-levels at f(p); `f_jets[r]` = D^r f(p);
/// `b_jets[j]` = D^j B(p). With (k,0,k) this is D^k((nu o f) B).
MLMap dcp_product(std::span<const MLMap> nu_jets, std::span<const MLMap> f_jets,
                  std::span<const MLMap> b_jets, const Bilinear& form, int k1, int k2, int k3);

/// Derivative of (1 - (nu o f) B)^{-1}, with the scalar form `form` pairing
/// nu with B:
///   Sym sum_{q=k2}^{k3} sum_{r1+..+rq=k1} k1!/(r1!..rq!) denom^{-(q+1)}
///       prod_j DCP^{(rj,0,rj)}.
/// With (k,1,k) this is D^k (1 - (nu o f) B)^{-1}. Throws
/// NearSingularDenominator when |denom| < 1e-9.
MLMap dicp_inverse(std::span<const MLMap> nu_jets, std::span<const MLMap> f_jets,
                   std::span<const MLMap> b_jets, const Bilinear& form, int k1, int k2, int k3,
                   double denom);

/// Jets of 1/g from jets of a scalar function g, up to `order`.
std::vector<MLMap> reciprocal_jets(std::span<const MLMap> g_jets, int order);

/// Composes every argument slot with the dim x dim matrix `mat` (row-major).
MLMap pushforward(const MLMap& b, std::span<const double> mat);

/// Block of `b` on the argument pattern `mask` (bit j set: argument j
/// restricted to the last coordinate, the F direction).
MLMap block(const MLMap& b, unsigned mask);

enum class NormKind { spectral, frobenius };

/// Spectral norm of a rows x cols matrix by 50 power iterations on the
/// smaller Gram matrix, started from a fixed pseudo-random vector.
double spectral_norm(std::span<const double> mat, int rows, int cols);

/// Norm of the unfolding (out x dim^k) of block `mask` of `b`.
double block_norm(const MLMap& b, unsigned mask, NormKind kind = NormKind::spectral);

/// |b|_i = sum_f k_f ||b_f||.
double adapted_norm(const MLMap& b, const PerronData& perron, NormKind kind = NormKind::spectral);

/// Flat debug dump: one "j1 j2 .. : r = value" line per coefficient.
std::string dump(const MLMap& b);

} // namespace folcomp
