#pragma once
/*-----------------------------------------------------------------------------
 * invprob.hpp -- diagonal inverse problems: spectral source sets, membership
 * radii, sharp geometry on source sets, invariance under gradient iterations,
 * decay-rate experiments, and restricted injectivity for sparse recovery.
 *
 * Setting: A = diag(sigma_1, ..., sigma_N) with sigma_k >= 0, data y, and the
 * objective f(x) = (1/2)|Ax - y|^2.  Write ybar for the projection of y onto
 * the closure of the range of A (kernel coordinates zeroed) and xdag = A^+ y.
 * The source set of order mu > -1/2 and radius delta > 0 is
 *
 *     X_mu(delta) = { xdag + (A*A)^mu w : w in ker(A)^perp, |w| <= delta }.
 *
 * Componentwise on sigma_k > 0 this reads
 *
 *     x_k = ybar_k / sigma_k + sigma_k^(2 mu) w_k,
 *
 * which covers -1/2 < mu < 0 as well, where the defining relation is
 * A x = ybar + (A A*)^(mu + 1/2) omega with the same coefficient vector.
 *
 * On X_mu(delta) the objective obeys a Lojasiewicz inequality
 *
 *     (f - inf f)^(1 - 1/p) <= c |grad f|,     p = 2 + 1/mu,
 *     c = 2^(-(mu+1)/(2 mu+1)) * delta^(1/(1 + 2 mu)),
 *
 * and the constant is attained along the witness family
 * v^k = delta sigma_k^(2 mu) e_k.  Gradient iterations never leave the source
 * set -- the coefficient radius |omega_n| is nonincreasing -- so the
 * certificate converts into decay rates: gap = O(n^(-(1+2 mu))) and, for
 * mu > 0, dist = O(n^(-mu)).  At mu = 0 only the worst-case o(1/n) envelope
 * remains.
 *
 * The sparse-recovery experiment plays the same game on a dense operator:
 * once the iterates of the l1-regularized solver freeze their support I, the
 * smallest Gram eigenvalue on I acts as a strong-convexity constant and the
 * tail contracts linearly at the predicted factor.
 *---------------------------------------------------------------------------*/

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "rates.hpp"
#include "solver.hpp"

namespace geofb {

/*-----------------------------------------------------------------------------
 * source specification and problem container
 *---------------------------------------------------------------------------*/

struct SourceSpec {
    double mu = 0.0;      /* smoothness order, > -1/2 */
    double delta = 1.0;   /* coefficient radius, > 0 */
};

inline void validate_source_spec(const SourceSpec& s)
{
    if (!(s.mu > -0.5)) {
        throw std::invalid_argument("source spec: mu must be > -1/2");
    }
    if (!(s.delta > 0.0)) {
        throw std::invalid_argument("source spec: delta must be > 0");
    }
}

struct DiagonalInverseProblem {
    DiagonalOperator A;
    vec y;
    vec ybar;   /* projection of y onto closure(range A) */
};

inline DiagonalInverseProblem make_diagonal_problem(const DiagonalOperator& A, const vec& y)
{
    validate_operator(LinearOperator{A});
    if (y.size() != A.sigmas.size()) {
        throw std::invalid_argument("diagonal problem: y size != operator size");
    }
    DiagonalInverseProblem P;
    P.A = A;
    P.y = y;
    P.ybar = y;
    for (std::size_t k = 0; k < y.size(); k++) {
        if (A.sigmas[k] == 0.0) { P.ybar[k] = 0.0; }
    }
    return P;
}

/* the least-squares composite this data defines */
inline CompositeProblem to_composite(const DiagonalInverseProblem& P)
{
    return make_least_squares(LinearOperator{P.A}, P.y);
}

/*-----------------------------------------------------------------------------
 * source points and membership
 *
 * construct: x_k = ybar_k/sigma_k + sigma_k^(2 mu) w_k on sigma_k > 0, zero on
 * the kernel.  The coefficient w must live in ker(A)^perp with |w| <= delta.
 * membership: invert the same relation, omega_k = (Ax - ybar)_k
 * sigma_k^-(2 mu + 1); the smallest admissible radius is |omega|.
 *---------------------------------------------------------------------------*/

struct SourcePoint {
    vec x0;
    vec w;
    double w_norm = 0.0;
};

inline SourcePoint construct_source_point(const DiagonalInverseProblem& P,
                                          const SourceSpec& spec, const vec& w)
{
    validate_source_spec(spec);
    const vec& sig = P.A.sigmas;
    if (w.size() != sig.size()) {
        throw std::invalid_argument("construct_source_point: w size mismatch");
    }
    double w2 = 0.0;
    for (std::size_t k = 0; k < w.size(); k++) {
        if (sig[k] == 0.0 && w[k] != 0.0) {
            throw std::invalid_argument(
                "construct_source_point: w has a kernel component");
        }
        w2 += w[k]*w[k];
    }
    const double wn = std::sqrt(w2);
    if (wn > spec.delta*(1.0 + 1e-12)) {
        throw std::invalid_argument("construct_source_point: |w| exceeds delta");
    }
    SourcePoint out;
    out.w = w;
    out.w_norm = wn;
    out.x0.assign(sig.size(), 0.0);
    for (std::size_t k = 0; k < sig.size(); k++) {
        if (sig[k] > 0.0) {
            out.x0[k] = P.ybar[k]/sig[k]
                      + std::pow(sig[k]*sig[k], spec.mu)*w[k];
        }
    }
    return out;
}

struct MembershipReport {
    bool member = false;
    double delta_min = 0.0;   /* smallest radius admitting x, |omega| */
    bool overflow = false;    /* radius exceeded 1e150: divergent in the limit */
    vec omega;
};

inline MembershipReport membership_check(const vec& x,
                                         const DiagonalInverseProblem& P, double mu)
{
    if (!(mu > -0.5)) {
        throw std::invalid_argument("membership_check: mu must be > -1/2");
    }
    const vec& sig = P.A.sigmas;
    if (x.size() != sig.size()) {
        throw std::invalid_argument("membership_check: x size mismatch");
    }
    MembershipReport rep;
    rep.omega.assign(sig.size(), 0.0);
    double w2 = 0.0;
    for (std::size_t k = 0; k < sig.size(); k++) {
        const double dk = sig[k]*x[k] - P.ybar[k];
        if (sig[k] == 0.0) {
            if (dk != 0.0) { return rep; }   /* outside closure(range A) */
            continue;
        }
        const double wk = dk*std::pow(sig[k], -(2.0*mu + 1.0));
        rep.omega[k] = wk;
        w2 += wk*wk;
    }
    rep.member = true;
    rep.delta_min = std::sqrt(w2);
    rep.overflow = !(rep.delta_min <= 1e150);
    return rep;
}

/*-----------------------------------------------------------------------------
 * the sharp certificate on a source set
 *---------------------------------------------------------------------------*/

inline GeometryCertificate loja_on_source_set(const SourceSpec& spec)
{
    validate_source_spec(spec);
    if (spec.mu == 0.0) {
        throw std::invalid_argument(
            "loja_on_source_set: mu = 0 carries no Lojasiewicz exponent");
    }
    const double p = 2.0 + 1.0/spec.mu;
    const double c = std::pow(2.0, -(spec.mu + 1.0)/(2.0*spec.mu + 1.0))
                   * std::pow(spec.delta, 1.0/(1.0 + 2.0*spec.mu));
    return make_certificate(GeometryCertificate::Kind::lojasiewicz, p, c,
                            source_set_domain(spec.mu, spec.delta), "exact");
}

/* witness v^k = delta sigma_k^(2 mu) e_k attaining the constant: the ratio
 * gap^(1-1/p)/|grad f| equals c for every k, and any smaller claimed constant
 * or any exponent p' < p is refuted along the family as sigma_k -> 0 */
struct WitnessReport {
    vec v;
    double gap = 0.0;
    double resid = 0.0;
    double rho = 0.0;    /* gap^(1-1/p) / resid at p = 2 + 1/mu */
    double c = 0.0;
    bool sound = false;  /* rho <= c up to roundoff */
};

inline WitnessReport optimality_witness(const vec& sigmas, double mu,
                                        double delta, int k)
{
    if (!(mu > 0.0)) {
        throw std::invalid_argument("optimality_witness: mu must be > 0");
    }
    if (!(delta > 0.0)) {
        throw std::invalid_argument("optimality_witness: delta must be > 0");
    }
    if (k < 0 || k >= static_cast<int>(sigmas.size())) {
        throw std::invalid_argument("optimality_witness: index out of range");
    }
    if (!(sigmas[k] > 0.0)) {
        throw std::invalid_argument("optimality_witness: sigma_k must be > 0");
    }
    DiagonalOperator A{sigmas};
    const CompositeProblem P = make_least_squares(LinearOperator{A},
                                                  vec(sigmas.size(), 0.0));
    WitnessReport rep;
    rep.v.assign(sigmas.size(), 0.0);
    rep.v[k] = delta*std::pow(sigmas[k]*sigmas[k], mu);
    rep.gap = objective(P, rep.v) - P.inf_value;
    rep.resid = min_norm_subgrad(P, rep.v);
    const double p = 2.0 + 1.0/mu;
    rep.rho = std::pow(rep.gap, 1.0 - 1.0/p)/rep.resid;
    rep.c = loja_on_source_set(SourceSpec{mu, delta}).constant;
    rep.sound = rep.rho <= rep.c*(1.0 + 1e-9);
    return rep;
}

/*-----------------------------------------------------------------------------
 * invariance: gradient iterations do not leave the source set
 *
 * x_{n+1} = x_n - lambda A*(A x_n - y) acts diagonally, multiplying each
 * coefficient omega_k by (1 - lambda sigma_k^2)^... -- so |omega_n| is
 * nonincreasing for every step size lambda in ]0, 2/|A*A|[.
 *---------------------------------------------------------------------------*/

struct SourceInvarianceReport {
    double lambda = 0.0;
    bool ok = false;
    long first_violation = -1;       /* step index of the first failure */
    double max_delta_min = 0.0;
    std::vector<double> delta_seq;   /* |omega_n| per step, n = 0..n_steps */
};

inline std::vector<SourceInvarianceReport>
source_invariance_check(const DiagonalInverseProblem& P, const SourceSpec& spec,
                        const std::vector<double>& lambdas, const vec& x0,
                        long n_steps)
{
    validate_source_spec(spec);
    if (n_steps < 1) {
        throw std::invalid_argument("source_invariance_check: n_steps must be >= 1");
    }
    const MembershipReport m0 = membership_check(x0, P, spec.mu);
    if (!m0.member || m0.delta_min > spec.delta*(1.0 + 1e-10)) {
        throw std::invalid_argument(
            "source_invariance_check: x0 is not a source point at this (mu, delta)");
    }
    const double lip = gram_norm(LinearOperator{P.A});
    std::vector<SourceInvarianceReport> out;
    for (double lam : lambdas) {
        validate_step(lam, lip);
        SourceInvarianceReport rep;
        rep.lambda = lam;
        rep.ok = true;
        rep.delta_seq.push_back(m0.delta_min);
        rep.max_delta_min = m0.delta_min;
        vec x = x0;
        for (long n = 1; n <= n_steps; n++) {
            const vec r = op_apply(LinearOperator{P.A}, x);
            for (std::size_t k = 0; k < x.size(); k++) {
                x[k] -= lam*P.A.sigmas[k]*(r[k] - P.y[k]);
            }
            const MembershipReport m = membership_check(x, P, spec.mu);
            const double prev = rep.delta_seq.back();
            rep.delta_seq.push_back(m.delta_min);
            rep.max_delta_min = std::max(rep.max_delta_min, m.delta_min);
            const bool in_set = m.member && m.delta_min <= spec.delta + 1e-10;
            const bool monotone = m.delta_min <= prev + 1e-12*std::max(1.0, prev);
            if (!(in_set && monotone) && rep.ok) {
                rep.ok = false;
                rep.first_violation = n;
            }
        }
        out.push_back(std::move(rep));
    }
    return out;
}

/*-----------------------------------------------------------------------------
 * decay-rate experiment on spectral families
 *
 * sigma_k = k^-q (poly) or rho^k (geo), k = 1..N, data y = 0, start at a
 * random source point x0 = (A*A)^mu w with |w| = delta.  For polynomial
 * families the coefficient profile w_k^2 ~ 1/k spreads the energy evenly
 * across log-scales so the fitted slope reflects the envelope exponent; a
 * flat profile would bias both slopes.  Geometric families are already
 * log-uniform, so there the profile is flat.
 *---------------------------------------------------------------------------*/

struct SigmaFamily {
    enum class Kind { poly, geo };
    Kind kind = Kind::poly;
    double param = 1.0;   /* q > 0 for poly, 0 < rho < 1 for geo */
};

inline vec make_sigma_family(const SigmaFamily& fam, int N)
{
    if (N < 1) { throw std::invalid_argument("sigma family: N must be >= 1"); }
    vec s(static_cast<std::size_t>(N));
    if (fam.kind == SigmaFamily::Kind::poly) {
        if (!(fam.param > 0.0)) {
            throw std::invalid_argument("sigma family: poly exponent must be > 0");
        }
        for (int k = 1; k <= N; k++) {
            s[k - 1] = std::pow(static_cast<double>(k), -fam.param);
        }
    } else {
        if (!(fam.param > 0.0 && fam.param < 1.0)) {
            throw std::invalid_argument("sigma family: geo ratio must be in ]0,1[");
        }
        for (int k = 1; k <= N; k++) {
            s[k - 1] = std::pow(fam.param, static_cast<double>(k));
        }
    }
    return s;
}

struct LandweberExperiment {
    Trace trace;
    bool has_cert = false;           /* mu != 0: source-set certificate used */
    GeometryCertificate cert;
    RatePrediction pred;
    CertReport report;
    double gap_slope = 0.0;          /* fitted on the unpolluted window */
    double dist_slope = 0.0;         /* NaN unless mu > 0 */
    bool truncation_limited = false; /* smallest retained mode pollutes the tail */
    long n_cut = 0;                  /* last iteration used for slope fits */
    bool loja_sound = false;         /* certificate inequality at every iterate */
    long loja_first_violation = -1;
    vec x0;
    double w_norm = 0.0;
};

inline LandweberExperiment landweber_rate_experiment(const SigmaFamily& fam, int N,
                                                     const SourceSpec& spec,
                                                     double lambda, long iters,
                                                     unsigned seed)
{
    validate_source_spec(spec);
    const vec sigmas = make_sigma_family(fam, N);
    const DiagonalInverseProblem D =
        make_diagonal_problem(DiagonalOperator{sigmas}, vec(sigmas.size(), 0.0));

    /* seeded coefficient vector: signs are symmetric, magnitudes follow the
     * family's log-uniform profile, total norm is exactly delta */
    rng r(seed);
    vec w(sigmas.size());
    for (std::size_t k = 0; k < w.size(); k++) {
        const double mag = (fam.kind == SigmaFamily::Kind::poly)
            ? 1.0/std::sqrt(static_cast<double>(k + 1)) : 1.0;
        w[k] = r.rademacher()*mag;
    }
    const double wn = nrm2(w);
    for (double& v : w) { v *= spec.delta/wn; }

    const SourcePoint sp = construct_source_point(D, spec, w);

    SolveConfig cfg;
    cfg.lambda = lambda;
    cfg.max_iters = iters;
    cfg.x0 = sp.x0;
    LandweberExperiment ex;
    ex.trace = run_landweber(LinearOperator{D.A}, D.y, cfg);
    ex.x0 = sp.x0;
    ex.w_norm = sp.w_norm;

    /* certificate and envelope: source-set geometry when mu != 0, the
     * worst-case o(1/n) envelope at mu = 0 */
    if (spec.mu != 0.0) {
        ex.has_cert = true;
        ex.cert = loja_on_source_set(spec);
        ex.pred = predict_from_certificate(lambda, ex.trace.lipschitz, ex.cert,
                                           ex.trace.rows[0].gap);
    } else {
        ex.pred = predict_worstcase(lambda, ex.trace.lipschitz,
                                    ex.trace.rows[0].dist);
    }
    ex.report = certify_trace(ex.trace, ex.pred);

    /* certificate inequality inline at every iterate */
    if (ex.has_cert) {
        ex.loja_sound = true;
        const double e = 1.0 - 1.0/ex.cert.p;
        for (const TraceRow& row : ex.trace.rows) {
            const double lhs = std::pow(row.gap, e);
            if (lhs > ex.cert.constant*row.resid*(1.0 + 1e-9) + 1e-300) {
                ex.loja_sound = false;
                ex.loja_first_violation = row.n;
                break;
            }
        }
    } else {
        ex.loja_sound = true;
    }

    /* truncation guard: the smallest retained mode decays on the timescale
     * sigma_N^-2; once its frozen contribution is a visible fraction of the
     * gap, later rows measure the cutoff instead of the source order */
    const long last = ex.trace.iters();
    const double sN = sigmas.back();
    const double xN = sp.x0.back();
    const double shrink = std::fabs(1.0 - lambda*sN*sN);
    auto tail_contrib = [&](long n) {
        return 0.5*(sN*xN)*(sN*xN)*std::pow(shrink, 2.0*static_cast<double>(n));
    };
    ex.n_cut = last;
    const double gap_last = ex.trace.rows.back().gap;
    if (gap_last > 0.0 && tail_contrib(last) > 0.01*gap_last) {
        ex.truncation_limited = true;
        long n = 1;
        while (n < last && ex.trace.rows[n + 1].gap >= 100.0*tail_contrib(n + 1)) {
            n++;
        }
        ex.n_cut = std::max(n, 16L);
    }

    /* slope fits on the unpolluted prefix */
    std::vector<double> gaps, dists;
    for (long n = 1; n <= ex.n_cut; n++) {
        gaps.push_back(ex.trace.rows[n].gap);
        dists.push_back(ex.trace.rows[n].dist);
    }
    ex.gap_slope = loglog_slope(gaps, 0.5).slope;
    ex.dist_slope = (spec.mu > 0.0) ? loglog_slope(dists, 0.5).slope
                                    : std::numeric_limits<double>::quiet_NaN();
    return ex;
}

/*-----------------------------------------------------------------------------
 * interpolation inequality |(AA*)^a x| <= |(AA*)^b x|^(a/b) |x|^(1-a/b)
 *---------------------------------------------------------------------------*/

struct InterpolationReport {
    bool ok = false;
    double lhs = 0.0;
    double rhs = 0.0;
};

inline InterpolationReport interpolation_check(const DiagonalOperator& A,
                                               const vec& x, double alpha,
                                               double beta)
{
    if (!(alpha >= 0.0 && alpha < beta)) {
        throw std::invalid_argument("interpolation_check: need 0 <= alpha < beta");
    }
    if (x.size() != A.sigmas.size()) {
        throw std::invalid_argument("interpolation_check: x size mismatch");
    }
    const vec ax = op_apply(LinearOperator{spectral_power(LinearOperator{A}, alpha)}, x);
    const vec bx = op_apply(LinearOperator{spectral_power(LinearOperator{A}, beta)}, x);
    InterpolationReport rep;
    rep.lhs = nrm2(ax);
    const double t = alpha/beta;
    rep.rhs = std::pow(nrm2(bx), t)*std::pow(nrm2(x), 1.0 - t);
    rep.ok = rep.lhs <= rep.rhs*(1.0 + 1e-12);
    return rep;
}

/*-----------------------------------------------------------------------------
 * sparse recovery under restricted injectivity
 *
 * l1-regularized least squares identifies its support in finitely many steps;
 * from then on the smallest Gram eigenvalue on the identified support is a
 * strong-convexity constant, and the tail contracts linearly.  The
 * s-restricted eigenvalue gamma_s > 0 is the a-priori guarantee that the
 * recovery problem distinguishes s-sparse candidates at all.
 *---------------------------------------------------------------------------*/

struct SparseRecoveryReport {
    bool ok = false;
    std::string failure;             /* nonempty when a precondition fails */
    long n0 = -1;                    /* first iteration with frozen support */
    SupportSet support;
    bool support_matches = false;    /* identified support == supp(xtrue) */
    double gamma_s = 0.0;            /* s-restricted smallest Gram eigenvalue */
    double gamma_I = 0.0;            /* smallest Gram eigenvalue on the support */
    double eps_I = 0.0;              /* predicted distance factor, NaN if lambda > 1/L */
    double kappa_val = 0.0;
    double gap_q_bound = 0.0;        /* 1/(1+kappa) from the converted certificate */
    double measured_gap_q = 0.0;     /* tail max of gap_{n+1}/gap_n, n >= n0 */
    double measured_dist_q = 0.0;
    Trace trace;
};

inline SparseRecoveryReport sparse_recovery_experiment(const DenseOperator& A,
                                                       const vec& xtrue,
                                                       double alpha, double lambda,
                                                       long iters,
                                                       double noise_level = 0.0,
                                                       unsigned seed = 1)
{
    validate_operator(LinearOperator{A});
    if (A.cols > 20) {
        throw std::invalid_argument(
            "sparse_recovery_experiment: restricted eigenvalue enumeration "
            "limited to 20 columns");
    }
    if (static_cast<int>(xtrue.size()) != A.cols) {
        throw std::invalid_argument("sparse_recovery_experiment: xtrue size mismatch");
    }
    SupportSet true_support = support_of(xtrue);
    const int s = static_cast<int>(true_support.indices.size());
    if (s < 1) {
        throw std::invalid_argument("sparse_recovery_experiment: xtrue must be nonzero");
    }

    SparseRecoveryReport rep;
    rep.gamma_s = restricted_min_eig(LinearOperator{A}, s);
    if (!(rep.gamma_s > 1e-12)) {
        rep.failure = "restricted injectivity fails: gamma_s = 0 at sparsity "
                    + std::to_string(s);
        return rep;
    }

    vec y = op_apply(LinearOperator{A}, xtrue);
    if (noise_level > 0.0) {
        rng r(seed);
        for (double& v : y) { v += noise_level*r.gaussian(); }
    }

    const CompositeProblem P = make_lasso(LinearOperator{A}, y, alpha);
    SolveConfig cfg;
    cfg.lambda = lambda;
    cfg.max_iters = iters;
    rep.trace = run_fb(P, cfg);

    const SupportReport id = detect_support_identification(rep.trace);
    if (!id.identified) {
        throw std::runtime_error(
            "sparse_recovery_experiment: support identification not detected "
            "within the iteration budget");
    }
    rep.n0 = id.iter;
    rep.support = id.support;
    rep.support_matches = id.support.indices == true_support.indices;

    /* after identification the problem is strongly convex on the support
     * subspace; convert the conditioning constant into the contraction pair */
    const double lip = P.h.lipschitz;
    if (rep.support.indices.empty()) {
        /* minimizer at the origin: the tail is exact after n0 */
        rep.gamma_I = lip;
    } else {
        rep.gamma_I = support_min_eig(LinearOperator{A}, rep.support);
    }
    const GeometryCertificate cond =
        make_certificate(GeometryCertificate::Kind::conditioned, 2.0, rep.gamma_I,
                         support_domain(rep.support), "exact");
    const GeometryCertificate loja = convert_forward(convert_forward(cond));
    rep.kappa_val = kappa(lambda, lip, loja.constant);
    rep.gap_q_bound = 1.0/(1.0 + rep.kappa_val);
    rep.eps_I = (lambda <= 1.0/lip*(1.0 + 1e-12))
        ? linear_backward(rep.gamma_I, lambda, lip)
        : std::numeric_limits<double>::quiet_NaN();

    /* measured tail factors from the identification point on; pairs below
     * the cancellation floor of objective - inf carry no signal */
    double qg = std::numeric_limits<double>::quiet_NaN();
    double qd = std::numeric_limits<double>::quiet_NaN();
    const double floor_g = 1e-12*std::max(1.0, rep.trace.rows[0].gap);
    const double floor_d = 1e-12*std::max(1.0, rep.trace.rows[0].dist);
    const long last = rep.trace.iters();
    for (long n = std::max(rep.n0, 1L); n < last; n++) {
        const TraceRow& a = rep.trace.rows[n];
        const TraceRow& b = rep.trace.rows[n + 1];
        if (a.gap > floor_g && b.gap > 0.0) {
            const double q = b.gap/a.gap;
            qg = std::isnan(qg) ? q : std::max(qg, q);
        }
        if (a.dist > floor_d && b.dist > 0.0) {
            const double q = b.dist/a.dist;
            qd = std::isnan(qd) ? q : std::max(qd, q);
        }
    }
    rep.measured_gap_q = qg;
    rep.measured_dist_q = qd;

    const bool gap_ok = std::isnan(qg) || qg <= rep.gap_q_bound*(1.0 + 1e-9) + 1e-12;
    const bool dist_ok = std::isnan(qd) || std::isnan(rep.eps_I)
                      || qd <= rep.eps_I*(1.0 + 1e-9) + 1e-12;
    rep.ok = gap_ok && dist_ok;
    return rep;
}

} // namespace geofb
