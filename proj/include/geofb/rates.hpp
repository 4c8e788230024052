#pragma once

/* Rate prediction and trace certification for forward-backward iterations.
 *
 * Given the step constants of the scheme,
 *
 *   a = (2 - lambda L) / (2 lambda),   b = 1 / lambda,
 *
 * and a Lojasiewicz certificate  (f - inf f)^(1-1/p) <= c * resid  on an
 * invariant region, the objective gap follows one of five regimes keyed by
 * the exponent p:
 *
 *   p = 1        finite termination after ceil(r0 / kappa) steps
 *   1 < p < 2    superlinear:  e_{n+1} = (e_n / kappa)^(p / (2(p-1)))
 *   p = 2        Q-linear:     e_n = r0 / (1 + kappa)^n
 *   p > 2        sublinear:    e_n = C_p'^(p/(p-2)) n^(-p/(p-2))
 *   p < 0        sublinear:    e_n = C_p'^(p/(p-2)) n^(p/(2-p))
 *
 * with kappa = a / (b^2 c^2) = lambda (2 - lambda L) / (2 c^2).  certify_trace
 * replays a recorded trace against the predicted envelope and reports the
 * first violation, the measured log-log slope, and the measured Q-factor.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "geometry.hpp"
#include "solver.hpp"

namespace geofb {

/* kappa = lambda (2 - lambda L) / (2 c^2); requires 0 < lambda < 2/L, c > 0 */
inline double kappa(double lambda, double lipschitz, double c)
{
    if (!(c > 0.0)) {
        throw std::invalid_argument("kappa: residual constant c must be positive");
    }
    validate_step(lambda, lipschitz);
    return lambda*(2.0 - lambda*lipschitz)/(2.0*c*c);
}

/* kappa = a / (b^2 c^2) for a general descent/residual/error triple */
inline double kappa_general(double a, double b, double c)
{
    if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0)) {
        throw std::invalid_argument("kappa_general: constants must be positive");
    }
    return a/(b*b*c*c);
}

namespace detail {

/* Per-step decrement constant for sequences r_n - r_{n+1} >= kappa r_{n+1}^alpha.
 *
 * With phi(r) = r^(1-alpha) and a threshold split at r_{n+1} >= s^(-1/alpha) r_n:
 *
 *   slow step:  phi(r_{n+1}) - phi(r_n) >= (alpha-1) r_n^{-alpha} kappa r_{n+1}^alpha
 *                                       >= kappa (alpha-1) / s
 *   fast step:  r_{n+1} <= (r_0/kappa)^{1/alpha}  (from the recursion itself), so
 *               phi(r_{n+1}) - phi(r_n) >= r_{n+1}^{1-alpha} (1 - s^{-(alpha-1)/alpha})
 *                                       >= (kappa/r_0)^m (1 - s^{-m}),
 *
 * m = (alpha-1)/alpha.  Either way phi grows by at least
 *
 *   delta(s) = min{ kappa (alpha-1)/s , (kappa/r_0)^m (1 - s^{-m}) }
 *
 * per step, and the bound optimizes over s: the first branch decreases from
 * kappa(alpha-1) to 0, the second increases from 0, so the max-min sits at
 * the unique crossing; bracket by doubling, then bisect to relative
 * tolerance 1e-12 in s. */
inline double sublinear_delta(double alpha, double kappa_, double r0)
{
    if (!(alpha > 1.0)) {
        throw std::invalid_argument("sublinear_delta: alpha must exceed 1");
    }
    if (!(kappa_ > 0.0) || !(r0 > 0.0)) {
        throw std::invalid_argument("sublinear_delta: kappa and r0 must be positive");
    }
    const double m = (alpha - 1.0)/alpha;
    const double B = std::pow(kappa_/r0, m);
    if (!std::isfinite(B) || !(B > 0.0)) {
        throw std::runtime_error("sublinear_delta: branch scale overflow");
    }
    auto f1 = [&](double s) { return kappa_*(alpha - 1.0)/s; };
    auto f2 = [&](double s) { return B*(1.0 - std::pow(s, -m)); };

    double lo = 1.0, hi = 2.0;
    while (f2(hi) < f1(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) {
            throw std::runtime_error("sublinear_delta: crossing bracket overflow");
        }
    }
    for (int it = 0; it < 200; it++) {
        const double mid = 0.5*(lo + hi);
        if (f2(mid) >= f1(mid)) { hi = mid; } else { lo = mid; }
        if (hi - lo <= 1e-12*lo) { break; }
    }
    const double s = 0.5*(lo + hi);
    return std::min(f1(s), f2(s));
}

/* small- vs large-kappa collapse of the decrement: the crossing behaves as
 * kappa for kappa <= 1 and as kappa^((alpha-1)/alpha) for kappa >= 1 */
inline double kappa_tilde(double alpha, double kappa_)
{
    const double m = (alpha - 1.0)/alpha;
    return std::min(kappa_, std::pow(kappa_, m));
}

} // namespace detail

/* scalar comparison-sequence bound: any r_{n+1} <= r_n with
 * r_n - r_{n+1} >= kappa r_{n+1}^alpha satisfies r_n <= (delta n)^(-1/(alpha-1))
 * with the optimized per-step decrement delta */
inline double sublinear_lemma_bound(double alpha, double kappa_, double r0, long n)
{
    if (!(alpha > 1.0)) {
        throw std::invalid_argument("sublinear_lemma_bound: alpha must exceed 1");
    }
    if (!(kappa_ > 0.0) || !(r0 > 0.0)) {
        throw std::invalid_argument("sublinear_lemma_bound: kappa and r0 must be positive");
    }
    if (n < 1) {
        throw std::invalid_argument("sublinear_lemma_bound: n must be >= 1");
    }
    const double delta = detail::sublinear_delta(alpha, kappa_, r0);
    return std::pow(delta*static_cast<double>(n), -1.0/(alpha - 1.0));
}

/* sublinear envelope constant; p > 2 or p < 0 map to alpha = 2(p-1)/p > 1:
 *
 *   (C_p')^{-1} = max_{s>=1} min{ kappa (p-2)/(p s),
 *                     (kappa/r0)^((p-2)/(2p-2)) (1 - s^(-(p-2)/(2p-2))) }
 */
inline double cprime(double p, double kappa_, double r0)
{
    if (!(p > 2.0) && !(p < 0.0)) {
        throw std::invalid_argument("cprime: exponent must satisfy p > 2 or p < 0");
    }
    if (!(kappa_ > 0.0) || !(r0 > 0.0)) {
        throw std::invalid_argument("cprime: kappa and r0 must be positive");
    }
    const double alpha = 2.0*(p - 1.0)/p;
    return 1.0/detail::sublinear_delta(alpha, kappa_, r0);
}

/* iterate-envelope constant
 *
 *   C_p = 2 p c (2 - lambda L)^{-1} + (2 lambda r0)^{1/2} (2 - lambda L)^{-1/2} r0^{-1/p}
 *
 * for p >= 2; for p <= 2 the trailing power of r0 is -1/2 instead of -1/p
 * (so the r0 factors cancel), and the two branches agree at p = 2. */
inline double cp_const(double p, double lambda, double lipschitz, double c, double r0)
{
    if (!(p >= 1.0)) {
        throw std::invalid_argument("cp_const: exponent must satisfy p >= 1");
    }
    if (!(c > 0.0) || !(r0 > 0.0)) {
        throw std::invalid_argument("cp_const: c and r0 must be positive");
    }
    validate_step(lambda, lipschitz);
    const double rel = 2.0 - lambda*lipschitz;
    auto branch = [&](double tail_exp) {
        return 2.0*p*c/rel + std::sqrt(2.0*lambda*r0)/std::sqrt(rel)*std::pow(r0, tail_exp);
    };
    if (p == 2.0) {
        const double above = branch(-1.0/p), below = branch(-0.5);
        if (std::fabs(above - below) > 1e-12*std::max(1.0, std::fabs(above))) {
            throw std::logic_error("cp_const: branch mismatch at p = 2");
        }
        return above;
    }
    return p > 2.0 ? branch(-1.0/p) : branch(-0.5);
}

enum class RateRegime { finite, superlinear, qlinear, sublinear_pos, sublinear_neg, worstcase };

inline std::string regime_name(RateRegime r)
{
    switch (r) {
        case RateRegime::finite:        return "finite";
        case RateRegime::superlinear:   return "superlinear";
        case RateRegime::qlinear:       return "qlinear";
        case RateRegime::sublinear_pos: return "sublinear_pos";
        case RateRegime::sublinear_neg: return "sublinear_neg";
        case RateRegime::worstcase:     return "worstcase";
    }
    return "unknown";
}

/* Predicted decay of the objective gap (and, where available, of the
 * distance to the solution set).  envelope(n) is the gap bound at iteration
 * n; the superlinear recursion is memoized so repeated queries stay cheap. */
struct RatePrediction {
    RateRegime regime = RateRegime::qlinear;
    double p = 2.0;
    double kappa = 0.0;
    double r0 = 0.0;                     /* initial gap (worstcase: dist0^2) */

    double a = 0.0, b = 0.0, c = 0.0;    /* descent / residual / error constants */
    double lambda = 0.0, lipschitz = 0.0;

    double C_p = 0.0;                    /* iterate-envelope constant */
    double C_p_prime = 0.0;              /* sublinear envelope constant */
    double epsilon = 0.0;                /* iterate R-factor (qlinear) */
    double superlinear_order = 0.0;      /* 1/(p-1) for p in ]1,2[ */
    long finite_bound_n = 0;             /* termination index (p = 1) */
    double worst_C = 0.0;                /* worstcase constant */

    mutable std::vector<double> memo;    /* superlinear envelope values */

    double envelope(long n) const
    {
        if (n < 0) { throw std::invalid_argument("envelope: negative iteration index"); }
        switch (regime) {
            case RateRegime::finite:
                return std::max(r0 - kappa*static_cast<double>(n), 0.0);
            case RateRegime::superlinear: {
                if (memo.empty()) { memo.push_back(r0); }
                const double expo = p/(2.0*(p - 1.0));
                while (static_cast<long>(memo.size()) <= n) {
                    memo.push_back(std::pow(memo.back()/kappa, expo));
                }
                return memo[static_cast<std::size_t>(n)];
            }
            case RateRegime::qlinear:
                return r0/std::pow(1.0 + kappa, static_cast<double>(n));
            case RateRegime::sublinear_pos: {
                if (n == 0) { return r0; }
                const double expo = p/(p - 2.0);
                return std::pow(C_p_prime, expo)*std::pow(static_cast<double>(n), -expo);
            }
            case RateRegime::sublinear_neg: {
                if (n == 0) { return r0; }
                return std::pow(C_p_prime, p/(p - 2.0))
                     * std::pow(static_cast<double>(n), p/(2.0 - p));
            }
            case RateRegime::worstcase: {
                if (n == 0) { return std::numeric_limits<double>::infinity(); }
                return worst_C*r0/(2.0*lambda*static_cast<double>(n));
            }
        }
        throw std::logic_error("envelope: unhandled regime");
    }

    bool has_iterate_envelope() const
    {
        return (regime == RateRegime::superlinear || regime == RateRegime::qlinear
                || regime == RateRegime::sublinear_pos) && C_p > 0.0;
    }

    /* bound on dist(x_n, argmin) in the regimes that provide one */
    double iterate_envelope(long n) const
    {
        if (!has_iterate_envelope()) {
            throw std::logic_error("iterate_envelope: not available in this regime");
        }
        switch (regime) {
            case RateRegime::superlinear:
                return C_p*std::sqrt(envelope(n));
            case RateRegime::qlinear:
                return C_p*std::sqrt(r0)*std::pow(1.0 + kappa, -0.5*static_cast<double>(n));
            case RateRegime::sublinear_pos: {
                if (n == 0) { return std::numeric_limits<double>::infinity(); }
                return C_p*std::pow(C_p_prime, 1.0/(p - 2.0))
                     * std::pow(static_cast<double>(n), -1.0/(p - 2.0));
            }
            default:
                throw std::logic_error("iterate_envelope: not available in this regime");
        }
    }
};

/* classify the exponent and assemble the envelope constants; cp and cp_prime
 * are consumed only by the regimes that use them */
inline RatePrediction predict(double p, double kappa_, double r0,
                              double cp = 0.0, double cp_prime = 0.0)
{
    if (!(kappa_ > 0.0)) {
        throw std::invalid_argument("predict: kappa must be positive");
    }
    if (!(r0 > 0.0)) {
        throw std::invalid_argument("predict: initial gap must be positive");
    }
    if (p > 0.0 && p < 1.0) {
        throw std::invalid_argument("predict: exponents in ]0,1[ are not covered");
    }
    if (p == 0.0) {
        throw std::invalid_argument("predict: exponent must be nonzero");
    }
    RatePrediction out;
    out.p = p;
    out.kappa = kappa_;
    out.r0 = r0;
    out.C_p = cp;
    if (p == 1.0) {
        out.regime = RateRegime::finite;
        out.finite_bound_n = static_cast<long>(std::ceil(r0/kappa_));
    } else if (p < 2.0 && p > 1.0) {
        out.regime = RateRegime::superlinear;
        out.superlinear_order = 1.0/(p - 1.0);
    } else if (p == 2.0) {
        out.regime = RateRegime::qlinear;
        out.epsilon = 1.0/std::sqrt(1.0 + kappa_);
    } else {
        out.regime = p > 2.0 ? RateRegime::sublinear_pos : RateRegime::sublinear_neg;
        out.C_p_prime = cp_prime > 0.0 ? cp_prime : cprime(p, kappa_, r0);
    }
    return out;
}

/* derive the full prediction from a Lojasiewicz certificate on an invariant
 * region: a = (2 - lambda L)/(2 lambda), b = 1/lambda, kappa = a/(b^2 c^2) */
inline RatePrediction predict_from_certificate(double lambda, double lipschitz,
                                               const GeometryCertificate& cert, double r0)
{
    if (cert.kind != GeometryCertificate::Kind::lojasiewicz) {
        throw std::invalid_argument("predict_from_certificate: need a lojasiewicz certificate");
    }
    validate_step(lambda, lipschitz);
    const double c = cert.constant;
    const double k = kappa(lambda, lipschitz, c);
    double cp = 0.0, cpp = 0.0;
    if (cert.p >= 1.0) { cp = cp_const(cert.p, lambda, lipschitz, c, r0); }
    if (cert.p > 2.0 || cert.p < 0.0) { cpp = cprime(cert.p, k, r0); }
    RatePrediction out = predict(cert.p, k, r0, cp, cpp);
    out.a = (2.0 - lambda*lipschitz)/(2.0*lambda);
    out.b = 1.0/lambda;
    out.c = c;
    out.lambda = lambda;
    out.lipschitz = lipschitz;
    return out;
}

/* certificate-free baseline: gap_n <= C dist0^2 / (2 lambda n) */
inline RatePrediction predict_worstcase(double lambda, double lipschitz, double dist0)
{
    validate_step(lambda, lipschitz);
    if (!(dist0 > 0.0)) {
        throw std::invalid_argument("predict_worstcase: initial distance must be positive");
    }
    RatePrediction out;
    out.regime = RateRegime::worstcase;
    out.p = 0.0;
    out.kappa = 0.0;
    out.r0 = dist0*dist0;
    out.lambda = lambda;
    out.lipschitz = lipschitz;
    const double prod = lambda*lipschitz;
    out.worst_C = prod <= 1.0 ? 1.0 : 1.0 + 2.0*(prod - 1.0)/(2.0 - prod);
    return out;
}

/* least-squares slope of log(series) against log(n) over the trailing
 * window; series[k] is the value at n = k + 1.  Zero and negative entries
 * are skipped; fewer than 5 usable points is an error.  The fit is repeated
 * on the trailing half of the window: a slope that keeps steepening marks a
 * superpolynomial (e.g. geometric) decay. */
struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    bool superpolynomial = false;
    long points = 0;
};

inline LogLogFit loglog_slope(const std::vector<double>& series, double window_fraction = 0.5)
{
    if (!(window_fraction > 0.0) || window_fraction > 1.0) {
        throw std::invalid_argument("loglog_slope: window fraction must lie in ]0,1]");
    }
    const long total = static_cast<long>(series.size());
    const long start = total - static_cast<long>(std::floor(window_fraction*total));
    auto fit = [&](long from, long upto) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        long cnt = 0;
        for (long k = std::max(from, 0L); k < upto; k++) {
            const double v = series[static_cast<std::size_t>(k)];
            if (!(v > 0.0) || !std::isfinite(v)) { continue; }
            const double x = std::log(static_cast<double>(k + 1));
            const double y = std::log(v);
            sx += x; sy += y; sxx += x*x; sxy += x*y;
            cnt++;
        }
        struct { double slope, intercept; long cnt; } r{0.0, 0.0, cnt};
        if (cnt >= 2) {
            const double den = cnt*sxx - sx*sx;
            r.slope = (cnt*sxy - sx*sy)/den;
            r.intercept = (sy - r.slope*sx)/cnt;
        }
        return r;
    };
    const auto main = fit(start, total);
    if (main.cnt < 5) {
        throw std::runtime_error("loglog_slope: fewer than 5 usable points in window");
    }
    LogLogFit out;
    out.slope = main.slope;
    out.intercept = main.intercept;
    out.points = main.cnt;
    /* a power law has the same slope on both halves of the window; a slope
     * that steepens by 20% or more marks superpolynomial decay */
    const long mid = start + (total - start)/2;
    const auto head = fit(start, mid);
    const auto tail = fit(mid, total);
    if (head.cnt >= 5 && tail.cnt >= 5 && head.slope < -0.5
            && tail.slope < 1.2*head.slope) {
        out.superpolynomial = true;
    }
    return out;
}

/* Trace certification: replay the recorded gaps against the predicted
 * envelope.  Q-checks compare consecutive gaps (qlinear ratio, superlinear
 * recursion); R-checks compare against the closed-form envelope.  The
 * finite regime asserts exact termination up to 1e-13 r0 slack. */
struct CertReport {
    bool pass = true;
    long first_violation = -1;
    double measured_slope = std::numeric_limits<double>::quiet_NaN();
    bool slope_superpolynomial = false;
    double measured_qfactor = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::pair<long, double>> checkpoints;
    std::string note;
};

inline CertReport certify_trace(const Trace& trace, const RatePrediction& pred)
{
    if (trace.rows.size() < 2) {
        throw std::invalid_argument("certify_trace: trace needs at least two rows");
    }
    const long last = static_cast<long>(trace.rows.size()) - 1;

    if (pred.regime == RateRegime::worstcase) {
        const double d0 = trace.rows.front().dist;
        if (std::isnan(d0)) {
            throw std::invalid_argument("certify_trace: worstcase envelope needs the dist column");
        }
        if (std::fabs(pred.r0 - d0*d0) > 1e-9*std::max(1.0, pred.r0)) {
            throw std::invalid_argument("certify_trace: prediction anchored at a different dist0");
        }
    } else {
        const double g0 = trace.rows.front().gap;
        if (std::fabs(pred.r0 - g0) > 1e-9*std::max(1.0, pred.r0)) {
            throw std::invalid_argument("certify_trace: prediction anchored at a different initial gap");
        }
    }

    CertReport rep;
    auto flag = [&](long n) {
        if (rep.first_violation < 0) { rep.first_violation = n; }
        rep.pass = false;
    };

    const double slack = 1e-13*std::max(1.0, pred.r0);
    switch (pred.regime) {
        case RateRegime::finite: {
            for (long n = pred.finite_bound_n; n <= last; n++) {
                if (trace.rows[static_cast<std::size_t>(n)].gap > slack) { flag(n); break; }
            }
            if (pred.finite_bound_n > last) {
                rep.pass = false;
                rep.note = "trace shorter than the predicted termination index";
            }
            break;
        }
        case RateRegime::superlinear: {
            const double expo = pred.p/(2.0*(pred.p - 1.0));
            for (long n = 0; n < last; n++) {
                const double gn = trace.rows[static_cast<std::size_t>(n)].gap;
                const double gn1 = trace.rows[static_cast<std::size_t>(n + 1)].gap;
                const double bound = gn > 0.0 ? std::pow(gn/pred.kappa, expo) : 0.0;
                if (gn1 > bound*(1.0 + 1e-9) + slack) { flag(n + 1); break; }
            }
            break;
        }
        case RateRegime::qlinear: {
            const double q = 1.0/(1.0 + pred.kappa);
            for (long n = 0; n < last; n++) {
                const double gn = trace.rows[static_cast<std::size_t>(n)].gap;
                const double gn1 = trace.rows[static_cast<std::size_t>(n + 1)].gap;
                if (gn1 > gn*q + slack) { flag(n + 1); break; }
            }
            for (long n = 0; n <= last; n++) {
                if (trace.rows[static_cast<std::size_t>(n)].gap
                        > pred.envelope(n)*(1.0 + 1e-9) + slack) {
                    flag(n);
                    break;
                }
            }
            break;
        }
        case RateRegime::sublinear_pos:
        case RateRegime::sublinear_neg:
        case RateRegime::worstcase: {
            for (long n = 1; n <= last; n++) {
                if (trace.rows[static_cast<std::size_t>(n)].gap
                        > pred.envelope(n)*(1.0 + 1e-9) + slack) {
                    flag(n);
                    break;
                }
            }
            break;
        }
    }

    /* measured log-log slope over the trailing half (n >= 1) */
    std::vector<double> gaps;
    gaps.reserve(static_cast<std::size_t>(last));
    for (long n = 1; n <= last; n++) {
        gaps.push_back(trace.rows[static_cast<std::size_t>(n)].gap);
    }
    try {
        const LogLogFit fit = loglog_slope(gaps, 0.5);
        rep.measured_slope = fit.slope;
        rep.slope_superpolynomial = fit.superpolynomial;
    } catch (const std::runtime_error&) {
        /* too few positive gaps: slope stays NaN */
    }

    /* measured Q-factor: worst consecutive ratio over the trailing quarter */
    double qf = std::numeric_limits<double>::quiet_NaN();
    for (long n = std::max(0L, last - (last + 3)/4); n < last; n++) {
        const double gn = trace.rows[static_cast<std::size_t>(n)].gap;
        const double gn1 = trace.rows[static_cast<std::size_t>(n + 1)].gap;
        if (gn > 0.0 && gn1 > 0.0) {
            const double ratio = gn1/gn;
            if (std::isnan(qf) || ratio > qf) { qf = ratio; }
        }
    }
    rep.measured_qfactor = qf;

    for (long n : {1L, last/4, last/2, 3*last/4, last}) {
        if (n >= 1 && n <= last) {
            rep.checkpoints.emplace_back(n, pred.envelope(n));
        }
    }
    return rep;
}

/*----------------------------------------------- per-iteration inequality --*/

/* The abstract descent pair behind every envelope in this module:
 *
 *     (H1)  a |x_{n+1} - x_n|^2  <=  f(x_n) - f(x_{n+1})
 *     (H2)  |df(x_{n+1})|_-      <=  b |x_{n+1} - x_n|
 *
 * Any iteration satisfying both inherits the rate machinery through
 * kappa = a/(b^2 c^2), so third-party traces can be audited from their
 * recorded columns alone.  Tolerances are additive, 1e-10 (1 + magnitude). */
struct DescentAudit {
    bool descent_ok = true;
    bool gradient_ok = true;
    long first_descent_violation = -1;
    long first_gradient_violation = -1;
    bool pass() const { return descent_ok && gradient_ok; }
};

inline DescentAudit general_descent_check(const std::vector<TraceRow>& rows,
                                          double a, double b)
{
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("general_descent_check: a and b must be > 0");
    }
    DescentAudit out;
    for (std::size_t i = 0; i + 1 < rows.size(); i++) {
        const TraceRow& r0 = rows[i];
        const TraceRow& r1 = rows[i + 1];
        const double drop = r0.gap - r1.gap;
        const double lhs = a*r1.step*r1.step;
        if (out.descent_ok
            && lhs > drop + 1e-10*(1.0 + std::fabs(drop) + lhs)) {
            out.descent_ok = false;
            out.first_descent_violation = r1.n;
        }
        if (out.gradient_ok
            && r1.resid > b*r1.step + 1e-10*(1.0 + r1.resid)) {
            out.gradient_ok = false;
            out.first_gradient_violation = r1.n;
        }
        if (!out.descent_ok && !out.gradient_ok) { break; }
    }
    return out;
}

/* the forward-backward instantiation a = (2 - lambda L)/(2 lambda),
 * b = 1/lambda, plus the chain and monotonicity facts specific to it:
 * step_{n+1}/lambda <= resid_n, gap and resid nonincreasing, iterates
 * Fejer-monotone with respect to the minimizers, and the worst-case bound
 * gap_n <= C dist_0^2 / (2 lambda n) */
struct FbAudit {
    DescentAudit descent;
    bool chain_ok = true;            /* step_{n+1}/lambda <= resid_n */
    bool gap_monotone_ok = true;
    bool resid_monotone_ok = true;
    bool fejer_ok = true;
    bool fejer_checked = false;      /* needs a distance column */
    bool worstcase_ok = true;
    bool worstcase_checked = false;  /* needs a distance column too */
    long first_chain_violation = -1;
    long first_gap_violation = -1;
    long first_resid_violation = -1;
    long first_fejer_violation = -1;
    long first_worstcase_violation = -1;
    bool pass() const
    {
        return descent.pass() && chain_ok && gap_monotone_ok
            && resid_monotone_ok && fejer_ok && worstcase_ok;
    }
};

inline FbAudit fb_inequality_audit(const Trace& t)
{
    const double lam = t.lambda;
    const double lip = t.lipschitz;
    validate_step(lam, lip);
    FbAudit out;
    out.descent = general_descent_check(t.rows, (2.0 - lam*lip)/(2.0*lam), 1.0/lam);

    const bool with_dist = !t.rows.empty() && !std::isnan(t.rows[0].dist);
    out.fejer_checked = with_dist;
    out.worstcase_checked = with_dist;
    const double d0 = with_dist ? t.rows[0].dist : 0.0;
    const double worst_c = (lam*lip <= 1.0)
        ? 1.0 : 1.0 + 2.0*(lam*lip - 1.0)/(2.0 - lam*lip);

    for (std::size_t i = 0; i + 1 < t.rows.size(); i++) {
        const TraceRow& r0 = t.rows[i];
        const TraceRow& r1 = t.rows[i + 1];
        if (out.chain_ok
            && r1.step/lam > r0.resid + 1e-10*(1.0 + r0.resid)) {
            out.chain_ok = false;
            out.first_chain_violation = r1.n;
        }
        if (out.gap_monotone_ok
            && r1.gap > r0.gap + 1e-10*(1.0 + std::fabs(r0.gap))) {
            out.gap_monotone_ok = false;
            out.first_gap_violation = r1.n;
        }
        if (out.resid_monotone_ok
            && r1.resid > r0.resid + 1e-10*(1.0 + r0.resid)) {
            out.resid_monotone_ok = false;
            out.first_resid_violation = r1.n;
        }
        if (with_dist && out.fejer_ok
            && r1.dist > r0.dist + 1e-10*(1.0 + r0.dist)) {
            out.fejer_ok = false;
            out.first_fejer_violation = r1.n;
        }
        if (with_dist && out.worstcase_ok && r1.n >= 1) {
            const double bound = worst_c*d0*d0/(2.0*lam*static_cast<double>(r1.n));
            if (r1.gap > bound + 1e-10*(1.0 + bound)) {
                out.worstcase_ok = false;
                out.first_worstcase_violation = r1.n;
            }
        }
    }
    return out;
}

/* epsilon-linear iterates imply a p = 2 metric-subregularity constant:
 * gamma = (2 - lambda L)(1 - epsilon)^2 / lambda */
inline double linear_forward(double epsilon, double lambda, double lipschitz)
{
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
        throw std::invalid_argument("linear_forward: rate factor must lie in ]0,1[");
    }
    validate_step(lambda, lipschitz);
    return (2.0 - lambda*lipschitz)*(1.0 - epsilon)*(1.0 - epsilon)/lambda;
}

/* a p = 2 subregularity constant implies epsilon-linear iterates with
 * epsilon = (1 + lambda gamma)^(-1/2); needs the short-step range */
inline double linear_backward(double gamma, double lambda, double lipschitz)
{
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("linear_backward: gamma must be positive");
    }
    validate_step(lambda, lipschitz);
    if (lipschitz > 0.0 && lambda > 1.0/lipschitz) {
        throw std::invalid_argument("linear_backward: requires lambda <= 1/L");
    }
    return 1.0/std::sqrt(1.0 + lambda*gamma);
}

/* Superlinear regime cross-checks along a trace, for p in ]1,2[:
 *   (i)  gamma_sub  * dist(x_{n+1}, S)^(p-1) <= (2/lambda) dist(x_n, S)
 *   (ii) gap_{n+1}^(p-1) <= (p/gamma_cond)^2 (2/lambda)^p gap_n
 * plus a fitted convergence order log dist_{n+1} / log dist_n -> 1/(p-1). */
struct SuperlinearReport {
    bool bound_dist_ok = true;
    bool bound_gap_ok = true;
    long first_violation = -1;
    double order_estimate = std::numeric_limits<double>::quiet_NaN();
    long pairs_checked = 0;
};

inline SuperlinearReport superlinear_bounds_check(const Trace& trace, double p,
                                                  double gamma_sub, double gamma_cond,
                                                  double lambda)
{
    if (!(p > 1.0) || !(p < 2.0)) {
        throw std::invalid_argument("superlinear_bounds_check: need p in ]1,2[");
    }
    if (!(gamma_sub > 0.0) || !(gamma_cond > 0.0) || !(lambda > 0.0)) {
        throw std::invalid_argument("superlinear_bounds_check: constants must be positive");
    }
    if (trace.rows.size() < 2) {
        throw std::invalid_argument("superlinear_bounds_check: trace needs at least two rows");
    }
    SuperlinearReport rep;
    const double two_over = 2.0/lambda;
    const double gap_coef = std::pow(p/gamma_cond, 2.0)*std::pow(two_over, p);
    std::vector<double> orders;
    for (std::size_t n = 0; n + 1 < trace.rows.size(); n++) {
        const auto& r0 = trace.rows[n];
        const auto& r1 = trace.rows[n + 1];
        const double tol = 1e-12*std::max(1.0, std::fabs(r0.gap));
        if (!std::isnan(r0.dist) && !std::isnan(r1.dist)) {
            if (gamma_sub*std::pow(r1.dist, p - 1.0) > two_over*r0.dist + tol) {
                rep.bound_dist_ok = false;
                if (rep.first_violation < 0) { rep.first_violation = static_cast<long>(n + 1); }
            }
            if (r0.dist > 0.0 && r0.dist < 0.5 && r1.dist > 1e-280) {
                orders.push_back(std::log(r1.dist)/std::log(r0.dist));
            }
        }
        if (std::pow(r1.gap, p - 1.0) > gap_coef*r0.gap + tol) {
            rep.bound_gap_ok = false;
            if (rep.first_violation < 0) { rep.first_violation = static_cast<long>(n + 1); }
        }
        rep.pairs_checked++;
    }
    if (!orders.empty()) {
        /* median of the log ratios: robust against the first and last pairs */
        std::vector<double> s = orders;
        std::sort(s.begin(), s.end());
        rep.order_estimate = s[s.size()/2];
    }
    return rep;
}

/* ---- serialization ---- */

inline nlohmann::json prediction_to_json(const RatePrediction& p)
{
    nlohmann::json j;
    j["regime"] = regime_name(p.regime);
    j["p"] = p.p;
    j["kappa"] = p.kappa;
    j["r0"] = p.r0;
    j["a"] = p.a;
    j["b"] = p.b;
    j["c"] = p.c;
    j["lambda"] = p.lambda;
    j["lipschitz"] = p.lipschitz;
    nlohmann::json cs;
    cs["C_p"] = p.C_p;
    cs["C_p_prime"] = p.C_p_prime;
    cs["epsilon"] = p.epsilon;
    cs["finite_bound_n"] = p.finite_bound_n;
    cs["superlinear_order"] = p.superlinear_order;
    cs["worst_C"] = p.worst_C;
    j["constants"] = cs;
    return j;
}

inline RatePrediction prediction_from_json(const nlohmann::json& j)
{
    RatePrediction p;
    const std::string reg = j.at("regime").get<std::string>();
    if (reg == "finite") { p.regime = RateRegime::finite; }
    else if (reg == "superlinear") { p.regime = RateRegime::superlinear; }
    else if (reg == "qlinear") { p.regime = RateRegime::qlinear; }
    else if (reg == "sublinear_pos") { p.regime = RateRegime::sublinear_pos; }
    else if (reg == "sublinear_neg") { p.regime = RateRegime::sublinear_neg; }
    else if (reg == "worstcase") { p.regime = RateRegime::worstcase; }
    else { throw std::invalid_argument("prediction_from_json: unknown regime " + reg); }
    p.p = j.at("p").get<double>();
    p.kappa = j.at("kappa").get<double>();
    p.r0 = j.at("r0").get<double>();
    p.a = j.value("a", 0.0);
    p.b = j.value("b", 0.0);
    p.c = j.value("c", 0.0);
    p.lambda = j.value("lambda", 0.0);
    p.lipschitz = j.value("lipschitz", 0.0);
    const auto& cs = j.at("constants");
    p.C_p = cs.value("C_p", 0.0);
    p.C_p_prime = cs.value("C_p_prime", 0.0);
    p.epsilon = cs.value("epsilon", 0.0);
    p.finite_bound_n = cs.value("finite_bound_n", 0L);
    p.superlinear_order = cs.value("superlinear_order", 0.0);
    p.worst_C = cs.value("worst_C", 0.0);
    return p;
}

inline nlohmann::json cert_report_to_json(const CertReport& r)
{
    nlohmann::json j;
    j["pass"] = r.pass;
    j["first_violation"] = r.first_violation;
    j["measured_slope"] = std::isnan(r.measured_slope)
        ? nlohmann::json() : nlohmann::json(r.measured_slope);
    j["slope_superpolynomial"] = r.slope_superpolynomial;
    j["measured_qfactor"] = std::isnan(r.measured_qfactor)
        ? nlohmann::json() : nlohmann::json(r.measured_qfactor);
    nlohmann::json cps = nlohmann::json::array();
    for (const auto& [n, e] : r.checkpoints) {
        cps.push_back({{"n", n}, {"envelope", e}});
    }
    j["checkpoints"] = cps;
    if (!r.note.empty()) { j["note"] = r.note; }
    return j;
}

} // namespace geofb
