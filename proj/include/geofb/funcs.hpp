/*=============================================================================
 * Composite objectives  f = g + h  with
 *
 *   g : proper convex lsc with a cheap prox       (nonsmooth part)
 *   h : convex with L-Lipschitz gradient          (smooth part)
 *
 * Smooth variants: zero, least squares 0.5||Ax-y||^2, quadratic
 * 0.5<x,Qx> - <b,x>, and the 1-D tail profile
 *
 *     h_a(x) = x^(-a)            if x >= 1
 *            = -a x + 1 + a      otherwise
 *
 * (C^1, convex, inf = 0, no minimizer, grad Lipschitz with L = a(1+a)).
 *
 * Prox variants: zero, weighted l1, weighted Euclidean norm powers w||x||^p
 * (radial prox via bisection + Newton on  s + t w p s^(p-1) = ||x||),
 * and the indicator of a centered ball.
 *
 * Each prox variant also exposes the exact distance from 0 to v + dg(x),
 * which gives the minimal-norm-subgradient residual ||df(x)||_- of the
 * composite through the sum rule.
 *
 * A CompositeProblem carries the certified minimum value and an argmin
 * oracle (a point, an affine set x_bar + ker A with exact projector, or a
 * cached uniquely-solved reference point) so that optimality gaps and
 * distances in traces are trustworthy.
 *===========================================================================*/
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "linops.hpp"

namespace geofb {

/*---------------------------------------------------------------- smooth --*/

struct SmoothFn {
    enum class Kind { zero, least_squares, quadratic, scalar_power_tail };
    Kind kind = Kind::zero;
    LinearOperator A;    /* least_squares */
    vec y;
    LinearOperator Q;    /* quadratic */
    vec b;
    double alpha = 1.0;  /* scalar_power_tail */
    double lipschitz = 0.0;

    double eval(const vec& x) const
    {
        switch (kind) {
        case Kind::zero:
            return 0.0;
        case Kind::least_squares: {
            const vec r = vsub(op_apply(A, x), y);
            return 0.5*dot(r, r);
        }
        case Kind::quadratic:
            return 0.5*dot(x, op_apply(Q, x)) - dot(b, x);
        case Kind::scalar_power_tail: {
            const double t = x.at(0);
            if (t >= 1.0) { return std::pow(t, -alpha); }
            return -alpha*t + 1.0 + alpha;
        }
        }
        return 0.0;
    }

    vec grad(const vec& x) const
    {
        switch (kind) {
        case Kind::zero:
            return vec(x.size(), 0.0);
        case Kind::least_squares:
            return op_adjoint_apply(A, vsub(op_apply(A, x), y));
        case Kind::quadratic:
            return vsub(op_apply(Q, x), b);
        case Kind::scalar_power_tail: {
            const double t = x.at(0);
            if (t >= 1.0) { return { -alpha*std::pow(t, -alpha - 1.0) }; }
            return { -alpha };
        }
        }
        return vec(x.size(), 0.0);
    }
};

/*------------------------------------------------------------------ prox --*/

/* componentwise soft threshold, prox of t*||.||_1 */
inline vec prox_l1(double t, const vec& x)
{
    if (t < 0.0) { throw std::invalid_argument("prox_l1: negative threshold"); }
    vec s(x.size());
    for (std::size_t i = 0; i < x.size(); i++) {
        const double a = std::fabs(x[i]) - t;
        s[i] = (a > 0.0) ? (x[i] > 0.0 ? a : -a) : 0.0;
    }
    return s;
}

/* radial magnitude of prox_{t w||.||^p}: the root of s + t w p s^(p-1) = rho.
 * Monotone in s, bracketed by [0, rho]; bisection then Newton polish. */
inline double prox_norm_pow_radius(double p, double w, double t, double rho)
{
    if (p < 1.0) { throw std::invalid_argument("prox_norm_pow: p must be >= 1"); }
    if (w <= 0.0 || t <= 0.0) { throw std::invalid_argument("prox_norm_pow: w, t must be > 0"); }
    if (rho <= 0.0) { return 0.0; }
    if (p == 1.0) { return std::max(rho - t*w, 0.0); }
    if (p == 2.0) { return rho/(1.0 + 2.0*t*w); }

    const double c = t*w*p;
    auto phi  = [&](double s) { return s + c*std::pow(s, p - 1.0) - rho; };
    auto dphi = [&](double s) { return 1.0 + c*(p - 1.0)*std::pow(s, p - 2.0); };

    double lo = 0.0, hi = rho;
    for (int it = 0; it < 80; it++) {
        const double mid = 0.5*(lo + hi);
        if (phi(mid) > 0.0) { hi = mid; } else { lo = mid; }
    }
    double s = 0.5*(lo + hi);
    for (int it = 0; it < 8; it++) {
        const double f = phi(s);
        if (std::fabs(f) <= 1e-14*std::max(1.0, rho)) { break; }
        const double step = f/dphi(s);
        double snew = s - step;
        if (snew <= lo || snew >= hi) { snew = 0.5*(lo + hi); }  /* stay bracketed */
        if (phi(snew) > 0.0) { hi = snew; } else { lo = snew; }
        s = snew;
    }
    return s;
}

struct ProxFn {
    enum class Kind { zero, l1, norm_pow, indicator_ball };
    Kind kind = Kind::zero;
    double alpha = 1.0;    /* l1 weight */
    double p = 2.0;        /* norm_pow exponent (>= 1) */
    double weight = 1.0;   /* norm_pow weight */
    double radius = 1.0;   /* indicator_ball */

    double eval(const vec& x) const
    {
        switch (kind) {
        case Kind::zero:
            return 0.0;
        case Kind::l1: {
            double s = 0.0;
            for (double v : x) { s += std::fabs(v); }
            return alpha*s;
        }
        case Kind::norm_pow:
            return weight*std::pow(nrm2(x), p);
        case Kind::indicator_ball:
            return (nrm2(x) <= radius + 1e-12*std::max(1.0, radius)) ? 0.0 : inf;
        }
        return 0.0;
    }

    vec prox(double t, const vec& x) const
    {
        if (t <= 0.0) { throw std::invalid_argument("prox: step must be > 0"); }
        switch (kind) {
        case Kind::zero:
            return x;
        case Kind::l1:
            return prox_l1(t*alpha, x);
        case Kind::norm_pow: {
            const double rho = nrm2(x);
            if (rho == 0.0) { return vec(x.size(), 0.0); }
            const double s = prox_norm_pow_radius(p, weight, t, rho);
            return scaled(x, s/rho);
        }
        case Kind::indicator_ball: {
            const double rho = nrm2(x);
            if (rho <= radius) { return x; }
            return scaled(x, radius/rho);
        }
        }
        return x;
    }

    /* dist(0, v + dg(x)); throws outside dom g */
    double subgrad_residual(const vec& x, const vec& v) const
    {
        switch (kind) {
        case Kind::zero:
            return nrm2(v);
        case Kind::l1: {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); i++) {
                double r;
                if (x[i] != 0.0) {
                    r = v[i] + alpha*(x[i] > 0.0 ? 1.0 : -1.0);
                } else {
                    r = std::max(std::fabs(v[i]) - alpha, 0.0);
                }
                s += r*r;
            }
            return std::sqrt(s);
        }
        case Kind::norm_pow: {
            const double rho = nrm2(x);
            if (rho == 0.0) {
                if (p > 1.0) { return nrm2(v); }               /* dg(0) = {0} */
                return std::max(nrm2(v) - weight, 0.0);        /* dg(0) = weight*ball */
            }
            vec r = v;
            const double coef = weight*p*std::pow(rho, p - 1.0)/rho;
            axpy(coef, x, r);
            return nrm2(r);
        }
        case Kind::indicator_ball: {
            const double rho = nrm2(x);
            if (rho > radius + 1e-12*std::max(1.0, radius)) {
                throw std::domain_error("subgrad_residual: point outside the ball");
            }
            if (rho < radius - 1e-12*std::max(1.0, radius)) { return nrm2(v); }
            /* boundary: min over tau >= 0 of ||v + tau x/||x|| || */
            const double inner = dot(v, x)/rho;
            if (inner >= 0.0) { return nrm2(v); }
            const double n2 = dot(v, v) - inner*inner;
            return std::sqrt(std::max(n2, 0.0));
        }
        }
        return nrm2(v);
    }
};

/*------------------------------------------------------------ argmin set --*/

struct ArgminOracle {
    enum class Kind { empty, point, affine, numeric };
    Kind kind = Kind::empty;
    vec xbar;                      /* point / numeric / affine base */
    vec kernel_mask;               /* affine, diagonal path: 1.0 on ker coords */
    std::vector<vec> kernel_basis; /* affine, dense path: orthonormal ker basis */

    bool available() const { return kind != Kind::empty; }

    /* nearest minimizer */
    vec project(const vec& x) const
    {
        if (kind == Kind::point || kind == Kind::numeric) { return xbar; }
        if (kind == Kind::affine) {
            vec out = xbar;
            if (!kernel_mask.empty()) {
                for (std::size_t k = 0; k < out.size(); k++) {
                    if (kernel_mask[k] != 0.0) { out[k] = x[k]; }
                }
            } else {
                const vec r = vsub(x, xbar);
                for (const vec& bvec : kernel_basis) { axpy(dot(r, bvec), bvec, out); }
            }
            return out;
        }
        throw std::logic_error("argmin oracle: no minimizer available");
    }

    double distance(const vec& x) const
    {
        return dist2(x, project(x));
    }
};

/*----------------------------------------------------------------- f=g+h --*/

struct CompositeProblem {
    ProxFn g;
    SmoothFn h;
    int dim = 0;
    double inf_value = 0.0;
    ArgminOracle argmin;
    std::string family = "custom";
};

inline double objective(const CompositeProblem& P, const vec& x)
{
    return P.g.eval(x) + P.h.eval(x);
}

/* ||df(x)||_- through the sum rule dg(x) + grad h(x) */
inline double min_norm_subgrad(const CompositeProblem& P, const vec& x)
{
    if (P.g.eval(x) == inf) { throw std::domain_error("min_norm_subgrad: x outside dom g"); }
    return P.g.subgrad_residual(x, P.h.grad(x));
}

inline void validate_step(double lambda, double lipschitz)
{
    if (!(lambda > 0.0)) { throw std::invalid_argument("step must be positive"); }
    if (lipschitz > 0.0 && !(lambda*lipschitz < 2.0)) {
        throw std::invalid_argument("step must satisfy lambda < 2/L");
    }
}

inline void validate_step(const CompositeProblem& P, double lambda)
{
    validate_step(lambda, P.h.lipschitz);
}

/* one forward-backward step  T_lambda x = prox_{lambda g}(x - lambda grad h(x)) */
inline vec fb_map(const CompositeProblem& P, double lambda, const vec& x)
{
    validate_step(P, lambda);
    vec v = x;
    axpy(-lambda, P.h.grad(x), v);
    return P.g.prox(lambda, v);
}

/*------------------------------------------------------------- factories --*/

namespace detail {

/* argmin oracle and minimum value for 0.5||Ax-y||^2 */
inline void least_squares_oracle(const LinearOperator& A, const vec& y,
                                 double& inf_value, ArgminOracle& out)
{
    if (std::holds_alternative<DiagonalOperator>(A)) {
        const auto& sig = std::get<DiagonalOperator>(A).sigmas;
        out.xbar = pinv_apply(A, y);
        double tail = 0.0;
        bool has_kernel = false;
        vec mask(sig.size(), 0.0);
        for (std::size_t k = 0; k < sig.size(); k++) {
            if (sig[k] == 0.0) {
                mask[k] = 1.0;
                has_kernel = true;
                tail += y[k]*y[k];
            }
        }
        inf_value = 0.5*tail;
        if (has_kernel) {
            out.kind = ArgminOracle::Kind::affine;
            out.kernel_mask = mask;
        } else {
            out.kind = ArgminOracle::Kind::point;
        }
        return;
    }
    const SymEig eig = gram_eig(A);
    const double cut = 1e-12*std::max(eig.values.back(), 1e-300);
    const vec aty = op_adjoint_apply(A, y);
    vec xbar(op_cols(A), 0.0);
    std::vector<vec> kernel;
    for (std::size_t i = 0; i < eig.values.size(); i++) {
        if (eig.values[i] > cut) {
            axpy(dot(eig.vectors[i], aty)/eig.values[i], eig.vectors[i], xbar);
        } else {
            kernel.push_back(eig.vectors[i]);
        }
    }
    out.xbar = xbar;
    const vec r = vsub(op_apply(A, xbar), y);
    inf_value = 0.5*dot(r, r);
    if (kernel.empty()) {
        out.kind = ArgminOracle::Kind::point;
    } else {
        out.kind = ArgminOracle::Kind::affine;
        out.kernel_basis = kernel;
    }
}

} // namespace detail

inline CompositeProblem make_least_squares(const LinearOperator& A, const vec& y)
{
    validate_operator(A);
    if (static_cast<int>(y.size()) != op_rows(A)) {
        throw std::invalid_argument("make_least_squares: y size != rows");
    }
    CompositeProblem P;
    P.family = "least_squares";
    P.dim = op_cols(A);
    P.g.kind = ProxFn::Kind::zero;
    P.h.kind = SmoothFn::Kind::least_squares;
    P.h.A = A;
    P.h.y = y;
    P.h.lipschitz = gram_norm(A);
    detail::least_squares_oracle(A, y, P.inf_value, P.argmin);
    return P;
}

/* lasso: the reference minimizer is produced by a tight proximal-gradient
 * run; a second run from a different start certifies uniqueness */
inline CompositeProblem make_lasso(const LinearOperator& A, const vec& y, double alpha)
{
    validate_operator(A);
    if (static_cast<int>(y.size()) != op_rows(A)) {
        throw std::invalid_argument("make_lasso: y size != rows");
    }
    if (!(alpha > 0.0)) { throw std::invalid_argument("make_lasso: alpha must be > 0"); }

    CompositeProblem P;
    P.family = "lasso";
    P.dim = op_cols(A);
    P.g.kind = ProxFn::Kind::l1;
    P.g.alpha = alpha;
    P.h.kind = SmoothFn::Kind::least_squares;
    P.h.A = A;
    P.h.y = y;
    P.h.lipschitz = gram_norm(A);
    if (P.h.lipschitz <= 0.0) {
        throw std::invalid_argument("make_lasso: zero operator");
    }

    const double lam = 1.0/P.h.lipschitz;
    auto solve_from = [&](vec x) {
        for (long it = 0; it < 1000000; it++) {
            vec v = x;
            axpy(-lam, P.h.grad(x), v);
            vec xn = prox_l1(lam*alpha, v);
            const double step = dist2(xn, x);
            x = std::move(xn);
            if (step < 1e-14) { break; }
        }
        return x;
    };

    const vec xref = solve_from(vec(P.dim, 0.0));
    rng r(mix_seed(0xA55E71u, "lasso-uniqueness"));
    vec x2 = r.gaussian_vec(P.dim);
    const vec xalt = solve_from(std::move(x2));
    if (dist2(xref, xalt) > 1e-8) {
        throw std::runtime_error("make_lasso: reference minimizer is not unique");
    }

    P.argmin.kind = ArgminOracle::Kind::numeric;
    P.argmin.xbar = xref;
    P.inf_value = std::min(objective(P, xref), objective(P, xalt));
    return P;
}

inline CompositeProblem make_norm_pow(double p, int dim = 1, double weight = 1.0)
{
    if (p < 1.0) { throw std::invalid_argument("make_norm_pow: p must be >= 1"); }
    if (dim < 1) { throw std::invalid_argument("make_norm_pow: dim must be >= 1"); }
    if (!(weight > 0.0)) { throw std::invalid_argument("make_norm_pow: weight must be > 0"); }
    CompositeProblem P;
    P.family = "norm_pow";
    P.dim = dim;
    P.g.kind = ProxFn::Kind::norm_pow;
    P.g.p = p;
    P.g.weight = weight;
    P.h.kind = SmoothFn::Kind::zero;
    P.h.lipschitz = 0.0;
    P.inf_value = 0.0;
    P.argmin.kind = ArgminOracle::Kind::point;
    P.argmin.xbar = vec(dim, 0.0);
    return P;
}

/* 1-D convex tail profile with inf = 0 and no minimizer */
inline CompositeProblem make_counterexample_neg(double alpha)
{
    if (!(alpha > 0.0)) { throw std::invalid_argument("make_counterexample_neg: alpha must be > 0"); }
    CompositeProblem P;
    P.family = "counterexample_neg";
    P.dim = 1;
    P.g.kind = ProxFn::Kind::zero;
    P.h.kind = SmoothFn::Kind::scalar_power_tail;
    P.h.alpha = alpha;
    P.h.lipschitz = alpha*(1.0 + alpha);
    P.inf_value = 0.0;
    P.argmin.kind = ArgminOracle::Kind::empty;
    return P;
}

inline CompositeProblem make_quadratic(const LinearOperator& Q, const vec& b)
{
    validate_operator(Q);
    const int n = op_cols(Q);
    if (op_rows(Q) != n) { throw std::invalid_argument("make_quadratic: Q must be square"); }
    if (static_cast<int>(b.size()) != n) { throw std::invalid_argument("make_quadratic: b size != n"); }

    CompositeProblem P;
    P.family = "quadratic";
    P.dim = n;
    P.g.kind = ProxFn::Kind::zero;
    P.h.kind = SmoothFn::Kind::quadratic;
    P.h.Q = Q;
    P.h.b = b;
    P.h.lipschitz = std::sqrt(gram_norm(Q));

    if (std::holds_alternative<DiagonalOperator>(Q)) {
        const auto& q = std::get<DiagonalOperator>(Q).sigmas;
        vec xbar(n, 0.0), mask(n, 0.0);
        bool has_kernel = false;
        for (int k = 0; k < n; k++) {
            if (q[k] > 0.0) {
                xbar[k] = b[k]/q[k];
            } else {
                if (b[k] != 0.0) {
                    throw std::invalid_argument("make_quadratic: unbounded below (b not in range Q)");
                }
                mask[k] = 1.0;
                has_kernel = true;
            }
        }
        P.argmin.xbar = xbar;
        if (has_kernel) {
            P.argmin.kind = ArgminOracle::Kind::affine;
            P.argmin.kernel_mask = mask;
        } else {
            P.argmin.kind = ArgminOracle::Kind::point;
        }
        P.inf_value = P.h.eval(xbar);
        return P;
    }

    const auto& d = std::get<DenseOperator>(Q);
    for (int i = 0; i < n; i++) {
        for (int j = i+1; j < n; j++) {
            if (std::fabs(d.entries[static_cast<std::size_t>(i)*n+j]
                        - d.entries[static_cast<std::size_t>(j)*n+i]) > 1e-12) {
                throw std::invalid_argument("make_quadratic: Q must be symmetric");
            }
        }
    }
    const SymEig eig = jacobi_sym_eig(d.entries, n, true);
    const double lmax = std::max(eig.values.back(), 0.0);
    if (eig.values.front() < -1e-10*std::max(lmax, 1.0)) {
        throw std::invalid_argument("make_quadratic: Q must be positive semidefinite");
    }
    const double cut = 1e-12*std::max(lmax, 1e-300);
    vec xbar(n, 0.0);
    std::vector<vec> kernel;
    for (int i = 0; i < n; i++) {
        if (eig.values[i] > cut) {
            axpy(dot(eig.vectors[i], b)/eig.values[i], eig.vectors[i], xbar);
        } else {
            if (std::fabs(dot(eig.vectors[i], b)) > 1e-10*std::max(1.0, nrm2(b))) {
                throw std::invalid_argument("make_quadratic: unbounded below (b not in range Q)");
            }
            kernel.push_back(eig.vectors[i]);
        }
    }
    P.argmin.xbar = xbar;
    if (kernel.empty()) {
        P.argmin.kind = ArgminOracle::Kind::point;
    } else {
        P.argmin.kind = ArgminOracle::Kind::affine;
        P.argmin.kernel_basis = kernel;
    }
    P.inf_value = P.h.eval(xbar);
    return P;
}

/* strict complementarity margin of an l1 composite at a minimizer:
 * min over zero coordinates of alpha - |grad h(xbar)_i| */
struct StrictComplementarity {
    bool holds = false;
    double min_margin = 0.0;
};

inline StrictComplementarity strict_complementarity(const CompositeProblem& P, const vec& xbar)
{
    if (P.g.kind != ProxFn::Kind::l1) {
        throw std::invalid_argument("strict_complementarity: l1 problems only");
    }
    const vec gr = P.h.grad(xbar);
    const double scale = nrm_inf(xbar);
    StrictComplementarity out;
    out.min_margin = inf;
    for (std::size_t i = 0; i < xbar.size(); i++) {
        if (std::fabs(xbar[i]) <= 1e-12*std::max(1.0, scale)) {
            out.min_margin = std::min(out.min_margin, P.g.alpha - std::fabs(gr[i]));
        }
    }
    if (out.min_margin == inf) { out.min_margin = P.g.alpha; }  /* no zero coords */
    out.holds = out.min_margin > 1e-8;
    return out;
}

/*------------------------------------------------------------------ JSON --*/

inline nlohmann::json prox_to_json(const ProxFn& g)
{
    nlohmann::json j;
    switch (g.kind) {
    case ProxFn::Kind::zero:           j["kind"] = "zero"; break;
    case ProxFn::Kind::l1:             j["kind"] = "l1"; j["alpha"] = g.alpha; break;
    case ProxFn::Kind::norm_pow:       j["kind"] = "norm_pow"; j["p"] = g.p; j["weight"] = g.weight; break;
    case ProxFn::Kind::indicator_ball: j["kind"] = "indicator_ball"; j["r"] = g.radius; break;
    }
    return j;
}

inline nlohmann::json smooth_to_json(const SmoothFn& h)
{
    nlohmann::json j;
    switch (h.kind) {
    case SmoothFn::Kind::zero:
        j["kind"] = "zero";
        break;
    case SmoothFn::Kind::least_squares:
        j["kind"] = "least_squares";
        j["A"] = operator_to_json(h.A);
        j["y"] = h.y;
        break;
    case SmoothFn::Kind::quadratic:
        j["kind"] = "quadratic";
        j["Q"] = operator_to_json(h.Q);
        j["b"] = h.b;
        break;
    case SmoothFn::Kind::scalar_power_tail:
        j["kind"] = "scalar_power_tail";
        j["alpha"] = h.alpha;
        break;
    }
    return j;
}

inline nlohmann::json problem_to_json(const CompositeProblem& P)
{
    nlohmann::json j;
    j["g"] = prox_to_json(P.g);
    j["h"] = smooth_to_json(P.h);
    j["dim"] = P.dim;
    return j;
}

/* Rebuild through the factories so oracles are recomputed, not trusted. */
inline CompositeProblem problem_from_json(const nlohmann::json& j)
{
    const nlohmann::json& jg = j.at("g");
    const nlohmann::json& jh = j.at("h");
    const std::string gk = jg.at("kind").get<std::string>();
    const std::string hk = jh.at("kind").get<std::string>();

    if (gk == "zero" && hk == "least_squares") {
        return make_least_squares(operator_from_json(jh.at("A")), jh.at("y").get<vec>());
    }
    if (gk == "l1" && hk == "least_squares") {
        return make_lasso(operator_from_json(jh.at("A")), jh.at("y").get<vec>(),
                          jg.at("alpha").get<double>());
    }
    if (gk == "norm_pow" && hk == "zero") {
        return make_norm_pow(jg.at("p").get<double>(), j.at("dim").get<int>(),
                             jg.value("weight", 1.0));
    }
    if (gk == "zero" && hk == "scalar_power_tail") {
        return make_counterexample_neg(jh.at("alpha").get<double>());
    }
    if (gk == "zero" && hk == "quadratic") {
        return make_quadratic(operator_from_json(jh.at("Q")), jh.at("b").get<vec>());
    }
    throw std::invalid_argument("problem_from_json: unsupported g/h combination '"
                                + gk + "' + '" + hk + "'");
}

inline std::uint64_t problem_hash(const CompositeProblem& P)
{
    return fnv1a(problem_to_json(P).dump());
}

} // namespace geofb
