/*=============================================================================
 * Test-side oracles, deliberately independent of the library's algorithms:
 *
 *   - symmetric eigenvalues by Sylvester inertia counting (LDL pivots) and
 *     bisection, vs. the library's closed forms / Jacobi sweeps
 *   - prox values by brute-force 1-D grid minimization with local zooming
 *   - the sublinear envelope's max-min constant by iterated grid search
 *   - scalar recursions generated implicitly for envelope soundness checks
 *===========================================================================*/
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

using vec = std::vector<double>;

/* number of eigenvalues of symmetric M strictly below t = number of negative
 * pivots of the elimination of M - t I (Sylvester's law of inertia) */
inline int inertia_below(const vec& M, int n, double t)
{
    vec B = M;
    for (int i = 0; i < n; i++) { B[static_cast<std::size_t>(i)*n + i] -= t; }
    int neg = 0;
    for (int k = 0; k < n; k++) {
        double piv = B[static_cast<std::size_t>(k)*n + k];
        if (piv == 0.0) { piv = -1e-300; }  /* tie goes below; t moves anyway */
        if (piv < 0.0) { neg++; }
        for (int i = k+1; i < n; i++) {
            const double f = B[static_cast<std::size_t>(i)*n + k]/piv;
            for (int j = k; j < n; j++) {
                B[static_cast<std::size_t>(i)*n + j] -= f*B[static_cast<std::size_t>(k)*n + j];
            }
        }
    }
    return neg;
}

/* k-th smallest eigenvalue (0-based) via inertia bisection */
inline double kth_eigenvalue(const vec& M, int n, int k)
{
    double scale = 0.0;
    for (int i = 0; i < n; i++) {
        double row = 0.0;
        for (int j = 0; j < n; j++) { row += std::fabs(M[static_cast<std::size_t>(i)*n + j]); }
        scale = std::max(scale, row);
    }
    double lo = -scale - 1.0, hi = scale + 1.0;
    for (int it = 0; it < 200; it++) {
        const double mid = 0.5*(lo + hi);
        if (inertia_below(M, n, mid) <= k) { lo = mid; } else { hi = mid; }
        if (hi - lo <= 1e-13*std::max(1.0, std::fabs(mid))) { break; }
    }
    return 0.5*(lo + hi);
}

inline vec sym_eigenvalues(const vec& M, int n)
{
    vec out(n);
    for (int k = 0; k < n; k++) { out[k] = kth_eigenvalue(M, n, k); }
    return out;
}

/* brute-force 1-D minimizer of phi over [lo, hi]: coarse grid + two zooms */
inline double grid_minimize(const std::function<double(double)>& phi,
                            double lo, double hi, int points = 20001)
{
    double best_x = lo;
    for (int round = 0; round < 3; round++) {
        double best = phi(lo);
        best_x = lo;
        for (int i = 1; i < points; i++) {
            const double x = lo + (hi - lo)*static_cast<double>(i)/(points - 1);
            const double v = phi(x);
            if (v < best) { best = v; best_x = x; }
        }
        const double h = (hi - lo)/(points - 1);
        lo = std::max(lo, best_x - 2.0*h);
        hi = std::min(hi, best_x + 2.0*h);
    }
    return best_x;
}

/* prox of t*g at x in 1-D: argmin_u t g(u) + (u-x)^2/2, u >= 0 searched
 * over [0, max(x,0)] (all our radial profiles have nonnegative prox) */
inline double prox_grid_1d(const std::function<double(double)>& g, double t, double x)
{
    auto phi = [&](double u) { return t*g(u) + 0.5*(u - x)*(u - x); };
    const double hi = std::max(x, 0.0);
    if (hi == 0.0) { return 0.0; }
    return grid_minimize(phi, 0.0, hi);
}

/* max over s >= 1 of min{ (alpha-1)/s , B (1 - s^(-m)) }:
 * one 1e6-point log grid locates the kink, two linear zooms refine it */
inline double maxmin_grid(double alpha, double B, double m)
{
    auto f1 = [&](double s) { return (alpha - 1.0)/s; };
    auto f2 = [&](double s) { return B*(1.0 - std::pow(s, -m)); };
    auto g  = [&](double s) { return std::min(f1(s), f2(s)); };

    double s_hi = 2.0;
    while (f2(s_hi) < f1(s_hi)) {
        s_hi *= 2.0;
        if (s_hi > 1e300) { break; }
    }
    s_hi *= 2.0;

    double lo = 1.0, hi = s_hi, best_s = lo;
    const int pts0 = 1000000;
    double best = g(lo);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 1; i < pts0; i++) {
        const double s = std::exp(llo + (lhi - llo)*static_cast<double>(i)/(pts0 - 1));
        const double v = g(s);
        if (v > best) { best = v; best_s = s; }
    }
    double h = best_s*(std::exp((lhi - llo)/(pts0 - 1)) - 1.0);
    lo = std::max(1.0, best_s - 2.0*h);
    hi = best_s + 2.0*h;
    for (int round = 0; round < 2; round++) {
        const int pts = 100001;
        best = g(lo); best_s = lo;
        for (int i = 1; i < pts; i++) {
            const double s = lo + (hi - lo)*static_cast<double>(i)/(pts - 1);
            const double v = g(s);
            if (v > best) { best = v; best_s = s; }
        }
        h = (hi - lo)/(pts - 1);
        lo = std::max(1.0, best_s - 2.0*h);
        hi = best_s + 2.0*h;
    }
    return best;
}

/* extremal scalar sequence r_{n+1} defined implicitly by
 * r_n - r_{n+1} = kappa * r_{n+1}^alpha  (bisection per step) */
inline vec equality_recursion(double alpha, double kappa, double r0, long n_steps)
{
    vec r;
    r.reserve(n_steps + 1);
    r.push_back(r0);
    for (long n = 0; n < n_steps; n++) {
        const double rn = r.back();
        auto f = [&](double x) { return x + kappa*std::pow(x, alpha) - rn; };
        double lo = 0.0, hi = rn;
        for (int it = 0; it < 200; it++) {
            const double mid = 0.5*(lo + hi);
            if (f(mid) > 0.0) { hi = mid; } else { lo = mid; }
            if (hi - lo <= 1e-16*std::max(1.0, hi)) { break; }
        }
        r.push_back(0.5*(lo + hi));
    }
    return r;
}

} // namespace oracle
