/*=============================================================================
 * Linear operators between finite-dimensional Euclidean spaces.
 *
 * Two concrete kinds: dense row-major matrices and square diagonal operators
 * with nonnegative entries (truncated SVD surrogates).  On top of them:
 *
 *   - gram_norm        ||A*A|| by power iteration on v -> A*(Av)
 *   - spectral_power   (A*A)^nu for diagonal A, with 0^(2nu) := 0
 *   - pinv_apply       Moore-Penrose solve (exact per-mode for diagonal,
 *                      eigendecomposition of the Gram for dense)
 *   - restricted_min_eig   min over all supports of size s of the smallest
 *                      eigenvalue of the restricted Gram (A_I)*(A_I)
 *   - support_min_eig  the same for one fixed support
 *
 * Eigenvalues of symmetric matrices of size <= 3 are computed in closed form,
 * larger ones with a cyclic Jacobi sweep (off-diagonal Frobenius norm below
 * 1e-13 relative).  JSON (de)serialization round-trips both operator kinds.
 *===========================================================================*/
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "core.hpp"

namespace geofb {

struct DenseOperator {
    int rows = 0;
    int cols = 0;
    vec entries;   /* row-major, rows*cols */
};

struct DiagonalOperator {
    vec sigmas;    /* square n x n, sigmas >= 0 */
};

using LinearOperator = std::variant<DenseOperator, DiagonalOperator>;

struct SupportSet {
    std::vector<int> indices;  /* sorted, unique */
};

inline void validate_operator(const LinearOperator& A)
{
    if (std::holds_alternative<DenseOperator>(A)) {
        const auto& d = std::get<DenseOperator>(A);
        if (d.rows <= 0 || d.cols <= 0) {
            throw std::invalid_argument("dense operator: nonpositive dimensions");
        }
        if (d.entries.size() != static_cast<std::size_t>(d.rows)*static_cast<std::size_t>(d.cols)) {
            throw std::invalid_argument("dense operator: entry count != rows*cols");
        }
    } else {
        const auto& d = std::get<DiagonalOperator>(A);
        for (double s : d.sigmas) {
            if (s < 0.0 || !std::isfinite(s)) {
                throw std::invalid_argument("diagonal operator: entries must be finite and >= 0");
            }
        }
    }
}

inline int op_rows(const LinearOperator& A)
{
    if (std::holds_alternative<DenseOperator>(A)) { return std::get<DenseOperator>(A).rows; }
    return static_cast<int>(std::get<DiagonalOperator>(A).sigmas.size());
}

inline int op_cols(const LinearOperator& A)
{
    if (std::holds_alternative<DenseOperator>(A)) { return std::get<DenseOperator>(A).cols; }
    return static_cast<int>(std::get<DiagonalOperator>(A).sigmas.size());
}

inline vec op_apply(const LinearOperator& A, const vec& x)
{
    if (static_cast<int>(x.size()) != op_cols(A)) {
        throw std::invalid_argument("apply: dimension mismatch");
    }
    if (std::holds_alternative<DiagonalOperator>(A)) {
        const auto& d = std::get<DiagonalOperator>(A);
        vec y(x.size());
        for (std::size_t k = 0; k < x.size(); k++) { y[k] = d.sigmas[k]*x[k]; }
        return y;
    }
    const auto& d = std::get<DenseOperator>(A);
    vec y(d.rows, 0.0);
    for (int i = 0; i < d.rows; i++) {
        double s = 0.0;
        const double* row = d.entries.data() + static_cast<std::size_t>(i)*d.cols;
        for (int j = 0; j < d.cols; j++) { s += row[j]*x[j]; }
        y[i] = s;
    }
    return y;
}

inline vec op_adjoint_apply(const LinearOperator& A, const vec& y)
{
    if (static_cast<int>(y.size()) != op_rows(A)) {
        throw std::invalid_argument("adjoint_apply: dimension mismatch");
    }
    if (std::holds_alternative<DiagonalOperator>(A)) {
        const auto& d = std::get<DiagonalOperator>(A);
        vec x(y.size());
        for (std::size_t k = 0; k < y.size(); k++) { x[k] = d.sigmas[k]*y[k]; }
        return x;
    }
    const auto& d = std::get<DenseOperator>(A);
    vec x(d.cols, 0.0);
    for (int i = 0; i < d.rows; i++) {
        const double* row = d.entries.data() + static_cast<std::size_t>(i)*d.cols;
        for (int j = 0; j < d.cols; j++) { x[j] += row[j]*y[i]; }
    }
    return x;
}

inline double frobenius_norm(const LinearOperator& A)
{
    double s = 0.0;
    if (std::holds_alternative<DenseOperator>(A)) {
        for (double v : std::get<DenseOperator>(A).entries) { s += v*v; }
    } else {
        for (double v : std::get<DiagonalOperator>(A).sigmas) { s += v*v; }
    }
    return std::sqrt(s);
}

/* Gram matrix A*A as a dense symmetric cols x cols array (row-major). */
inline vec gram_matrix(const LinearOperator& A)
{
    const int n = op_cols(A);
    vec G(static_cast<std::size_t>(n)*n, 0.0);
    if (std::holds_alternative<DiagonalOperator>(A)) {
        const auto& d = std::get<DiagonalOperator>(A);
        for (int k = 0; k < n; k++) { G[static_cast<std::size_t>(k)*n + k] = d.sigmas[k]*d.sigmas[k]; }
        return G;
    }
    const auto& d = std::get<DenseOperator>(A);
    for (int i = 0; i < n; i++) {
        for (int j = i; j < n; j++) {
            double s = 0.0;
            for (int r = 0; r < d.rows; r++) {
                s += d.entries[static_cast<std::size_t>(r)*n + i]*d.entries[static_cast<std::size_t>(r)*n + j];
            }
            G[static_cast<std::size_t>(i)*n + j] = s;
            G[static_cast<std::size_t>(j)*n + i] = s;
        }
    }
    return G;
}

/*-----------------------------------------------------------------------------
 * Symmetric eigenvalues.
 *---------------------------------------------------------------------------*/

/* closed forms for n <= 3 (ascending) */
inline vec sym_eigenvalues_closed(const vec& M, int n)
{
    if (n == 1) { return { M[0] }; }
    if (n == 2) {
        const double a = M[0], b = M[1], c = M[3];
        const double mean = 0.5*(a + c);
        const double rad  = std::sqrt(0.25*(a - c)*(a - c) + b*b);
        return { mean - rad, mean + rad };
    }
    if (n == 3) {
        const double a11 = M[0], a12 = M[1], a13 = M[2];
        const double a22 = M[4], a23 = M[5], a33 = M[8];
        const double p1 = a12*a12 + a13*a13 + a23*a23;
        if (p1 == 0.0) {
            vec e = { a11, a22, a33 };
            std::sort(e.begin(), e.end());
            return e;
        }
        const double q  = (a11 + a22 + a33)/3.0;
        const double p2 = (a11-q)*(a11-q) + (a22-q)*(a22-q) + (a33-q)*(a33-q) + 2.0*p1;
        const double p  = std::sqrt(p2/6.0);
        /* B = (M - q I)/p, r = det(B)/2 */
        const double b11 = (a11-q)/p, b22 = (a22-q)/p, b33 = (a33-q)/p;
        const double b12 = a12/p, b13 = a13/p, b23 = a23/p;
        double r = 0.5*(b11*(b22*b33 - b23*b23) - b12*(b12*b33 - b23*b13) + b13*(b12*b23 - b22*b13));
        r = std::clamp(r, -1.0, 1.0);
        const double phi = std::acos(r)/3.0;
        const double twopi3 = 2.0943951023931954923;
        const double e1 = q + 2.0*p*std::cos(phi);
        const double e3 = q + 2.0*p*std::cos(phi + 2.0*twopi3);
        const double e2 = 3.0*q - e1 - e3;
        vec e = { e3, e2, e1 };
        std::sort(e.begin(), e.end());
        return e;
    }
    throw std::invalid_argument("sym_eigenvalues_closed: n must be <= 3");
}

struct SymEig {
    vec values;                 /* ascending */
    std::vector<vec> vectors;   /* vectors[i] pairs with values[i] */
};

/* cyclic Jacobi on a symmetric n x n matrix; stops when the off-diagonal
 * Frobenius norm falls below 1e-13 relative to the matrix norm */
inline SymEig jacobi_sym_eig(vec M, int n, bool want_vectors)
{
    std::vector<vec> V;
    if (want_vectors) {
        V.assign(n, vec(n, 0.0));
        for (int i = 0; i < n; i++) { V[i][i] = 1.0; }
    }
    auto at = [&](int i, int j) -> double& { return M[static_cast<std::size_t>(i)*n + j]; };

    double fro = 0.0;
    for (double v : M) { fro += v*v; }
    fro = std::sqrt(fro);
    const double tol = 1e-13*std::max(fro, 1e-300);

    for (int sweep = 0; sweep < 100; sweep++) {
        double off = 0.0;
        for (int i = 0; i < n; i++) {
            for (int j = i+1; j < n; j++) { off += 2.0*at(i,j)*at(i,j); }
        }
        if (std::sqrt(off) <= tol) { break; }
        for (int p = 0; p < n-1; p++) {
            for (int q = p+1; q < n; q++) {
                const double apq = at(p,q);
                if (std::fabs(apq) <= 1e-300) { continue; }
                const double theta = (at(q,q) - at(p,p))/(2.0*apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0)
                               / (std::fabs(theta) + std::sqrt(theta*theta + 1.0));
                const double c = 1.0/std::sqrt(t*t + 1.0);
                const double s = t*c;
                for (int k = 0; k < n; k++) {
                    const double mkp = at(k,p), mkq = at(k,q);
                    at(k,p) = c*mkp - s*mkq;
                    at(k,q) = s*mkp + c*mkq;
                }
                for (int k = 0; k < n; k++) {
                    const double mpk = at(p,k), mqk = at(q,k);
                    at(p,k) = c*mpk - s*mqk;
                    at(q,k) = s*mpk + c*mqk;
                }
                if (want_vectors) {
                    for (int k = 0; k < n; k++) {
                        const double vkp = V[k][p] /*col p*/, vkq = V[k][q];
                        V[k][p] = c*vkp - s*vkq;
                        V[k][q] = s*vkp + c*vkq;
                    }
                }
            }
        }
    }

    std::vector<int> order(n);
    for (int i = 0; i < n; i++) { order[i] = i; }
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return at(a,a) < at(b,b); });

    SymEig out;
    out.values.resize(n);
    for (int i = 0; i < n; i++) { out.values[i] = at(order[i], order[i]); }
    if (want_vectors) {
        out.vectors.assign(n, vec(n));
        for (int i = 0; i < n; i++) {
            for (int k = 0; k < n; k++) { out.vectors[i][k] = V[k][order[i]]; }
        }
    }
    return out;
}

/* ascending eigenvalues of a symmetric matrix, closed form for n <= 3 */
inline vec sym_eigenvalues(const vec& M, int n)
{
    if (n <= 3) { return sym_eigenvalues_closed(M, n); }
    return jacobi_sym_eig(M, n, false).values;
}

/* eigendecomposition of the Gram A*A (always via Jacobi, with vectors) */
inline SymEig gram_eig(const LinearOperator& A)
{
    return jacobi_sym_eig(gram_matrix(A), op_cols(A), true);
}

/*-----------------------------------------------------------------------------
 * gram_norm: largest eigenvalue of A*A.
 *
 * Power iteration with the deterministic all-ones start, stopping when two
 * successive Rayleigh quotients agree to 1e-12 relative (at most 1e5
 * iterations).  The all-ones start can be exactly orthogonal to the leading
 * eigenvector, in which case the quotient stagnates on an interior
 * eigenvalue; a residual test catches that and restarts once from a
 * staggered deterministic vector.  Diagonal operators are exact.
 *---------------------------------------------------------------------------*/
struct GramNormResult {
    double value = 0.0;
    bool zero_operator = false;
    long iterations = 0;
};

namespace detail {

inline vec gram_apply(const LinearOperator& A, const vec& v)
{
    return op_adjoint_apply(A, op_apply(A, v));
}

inline bool power_iterate(const LinearOperator& A, vec v, GramNormResult& out)
{
    const double nv = nrm2(v);
    for (auto& c : v) { c /= nv; }
    double rho_prev = -1.0;
    for (long it = 0; it < 100000; it++) {
        vec w = gram_apply(A, v);
        const double rho = dot(v, w);
        out.iterations += 1;
        if (it > 0 && std::fabs(rho - rho_prev) <= 1e-12*std::max(1.0, std::fabs(rho))) {
            /* quotient stagnation counts as convergence only with a small
             * eigen-residual; a transient plateau keeps iterating */
            double res = 0.0;
            for (std::size_t k = 0; k < v.size(); k++) {
                const double d = w[k] - rho*v[k];
                res += d*d;
            }
            if (std::sqrt(res) <= 1e-9*std::max(1.0, rho)) {
                out.value = rho;
                return true;
            }
        }
        rho_prev = rho;
        const double nw = nrm2(w);
        if (nw == 0.0) {
            /* start vector lies in ker A*A; needs a different start */
            out.value = 0.0;
            return false;
        }
        for (std::size_t k = 0; k < w.size(); k++) { v[k] = w[k]/nw; }
    }
    out.value = rho_prev;
    return true;  /* iteration budget exhausted: keep the last quotient */
}

} // namespace detail

inline GramNormResult gram_norm_result(const LinearOperator& A)
{
    validate_operator(A);
    GramNormResult out;
    if (std::holds_alternative<DiagonalOperator>(A)) {
        const auto& d = std::get<DiagonalOperator>(A);
        double m = 0.0;
        for (double s : d.sigmas) { m = std::max(m, s*s); }
        out.value = m;
        out.zero_operator = (m == 0.0);
        return out;
    }
    if (frobenius_norm(A) == 0.0) {
        out.zero_operator = true;
        return out;
    }
    const int n = op_cols(A);
    vec ones(n, 1.0);
    detail::power_iterate(A, ones, out);
    /* The ones start can be an exact eigenvector of an interior eigenvalue
     * (then the quotient is stationary from step one and no residual test
     * can tell).  A second run from a staggered start breaks the tie. */
    GramNormResult second;
    vec stag(n);
    for (int k = 0; k < n; k++) { stag[k] = 1.0 + (k + 1)*0x1.0p-20; }
    detail::power_iterate(A, stag, second);
    out.iterations += second.iterations;
    out.value = std::max(out.value, second.value);
    return out;
}

inline double gram_norm(const LinearOperator& A)
{
    return gram_norm_result(A).value;
}

/*-----------------------------------------------------------------------------
 * spectral calculus on diagonal operators
 *---------------------------------------------------------------------------*/

/* (A*A)^nu as a diagonal operator with entries sigma^(2 nu); 0^(2 nu) := 0
 * for every nu, including nu = 0 (the convention acts on ker A) */
inline DiagonalOperator spectral_power(const LinearOperator& A, double nu)
{
    if (!std::holds_alternative<DiagonalOperator>(A)) {
        throw std::invalid_argument("spectral_power: diagonal operator required");
    }
    const auto& d = std::get<DiagonalOperator>(A);
    DiagonalOperator out;
    out.sigmas.resize(d.sigmas.size());
    for (std::size_t k = 0; k < d.sigmas.size(); k++) {
        out.sigmas[k] = (d.sigmas[k] == 0.0) ? 0.0 : std::pow(d.sigmas[k], 2.0*nu);
    }
    return out;
}

/* Moore-Penrose solve x = A^+ y */
inline vec pinv_apply(const LinearOperator& A, const vec& y)
{
    if (static_cast<int>(y.size()) != op_rows(A)) {
        throw std::invalid_argument("pinv_apply: dimension mismatch");
    }
    if (std::holds_alternative<DiagonalOperator>(A)) {
        const auto& d = std::get<DiagonalOperator>(A);
        vec x(y.size(), 0.0);
        for (std::size_t k = 0; k < y.size(); k++) {
            if (d.sigmas[k] > 0.0) { x[k] = y[k]/d.sigmas[k]; }
        }
        return x;
    }
    /* x = V diag(1/lambda) V^T A^T y on the strictly positive spectrum */
    const SymEig eig = gram_eig(A);
    const double lmax = std::max(eig.values.back(), 0.0);
    const double cut = 1e-12*std::max(lmax, 1e-300);
    const vec aty = op_adjoint_apply(A, y);
    vec x(aty.size(), 0.0);
    for (std::size_t i = 0; i < eig.values.size(); i++) {
        if (eig.values[i] > cut) {
            const double coeff = dot(eig.vectors[i], aty)/eig.values[i];
            axpy(coeff, eig.vectors[i], x);
        }
    }
    return x;
}

/*-----------------------------------------------------------------------------
 * restricted smallest eigenvalues of the Gram
 *---------------------------------------------------------------------------*/

inline void validate_support(const SupportSet& I, int n)
{
    if (I.indices.empty()) { throw std::invalid_argument("support set must be nonempty"); }
    int prev = -1;
    for (int i : I.indices) {
        if (i < 0 || i >= n) { throw std::invalid_argument("support index out of range"); }
        if (i <= prev) { throw std::invalid_argument("support indices must be sorted and unique"); }
        prev = i;
    }
}

/* smallest eigenvalue of G restricted to rows/cols I (G symmetric n x n) */
inline double support_min_eig_gram(const vec& G, int n, const SupportSet& I)
{
    validate_support(I, n);
    const int s = static_cast<int>(I.indices.size());
    vec sub(static_cast<std::size_t>(s)*s);
    for (int a = 0; a < s; a++) {
        for (int b = 0; b < s; b++) {
            sub[static_cast<std::size_t>(a)*s + b] =
                G[static_cast<std::size_t>(I.indices[a])*n + I.indices[b]];
        }
    }
    return sym_eigenvalues(sub, s).front();
}

inline double support_min_eig(const LinearOperator& A, const SupportSet& I)
{
    return support_min_eig_gram(gram_matrix(A), op_cols(A), I);
}

struct RestrictedMinEig {
    double value = 0.0;
    SupportSet minimizer;
};

/* min over |I| = s of lambda_min(G_II); exhaustive over supports */
inline RestrictedMinEig restricted_min_eig_gram(const vec& G, int n, int s)
{
    if (n > 20) {
        throw std::invalid_argument("restricted_min_eig: exhaustive search capped at 20 columns");
    }
    if (s < 1 || s > n) { throw std::invalid_argument("restricted_min_eig: need 1 <= s <= cols"); }

    RestrictedMinEig best;
    best.value = inf;
    std::vector<int> idx(s);
    for (int i = 0; i < s; i++) { idx[i] = i; }
    while (true) {
        SupportSet I;
        I.indices = idx;
        const double e = support_min_eig_gram(G, n, I);
        if (e < best.value) {
            best.value = e;
            best.minimizer = I;
        }
        /* next combination */
        int k = s - 1;
        while (k >= 0 && idx[k] == n - s + k) { k--; }
        if (k < 0) { break; }
        idx[k]++;
        for (int j = k+1; j < s; j++) { idx[j] = idx[j-1] + 1; }
    }
    return best;
}

inline double restricted_min_eig(const LinearOperator& A, int s)
{
    return restricted_min_eig_gram(gram_matrix(A), op_cols(A), s).value;
}

/*-----------------------------------------------------------------------------
 * JSON round-trip
 *---------------------------------------------------------------------------*/

inline nlohmann::json operator_to_json(const LinearOperator& A)
{
    nlohmann::json j;
    if (std::holds_alternative<DenseOperator>(A)) {
        const auto& d = std::get<DenseOperator>(A);
        j["kind"] = "dense";
        j["rows"] = d.rows;
        j["cols"] = d.cols;
        j["entries"] = d.entries;
    } else {
        j["kind"] = "diagonal";
        j["sigmas"] = std::get<DiagonalOperator>(A).sigmas;
    }
    return j;
}

inline LinearOperator operator_from_json(const nlohmann::json& j)
{
    const std::string kind = j.at("kind").get<std::string>();
    LinearOperator A;
    if (kind == "dense") {
        DenseOperator d;
        d.rows = j.at("rows").get<int>();
        d.cols = j.at("cols").get<int>();
        d.entries = j.at("entries").get<vec>();
        A = d;
    } else if (kind == "diagonal") {
        DiagonalOperator d;
        d.sigmas = j.at("sigmas").get<vec>();
        A = d;
    } else {
        throw std::invalid_argument("operator_from_json: unknown kind '" + kind + "'");
    }
    validate_operator(A);
    return A;
}

} // namespace geofb
