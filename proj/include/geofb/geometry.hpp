/*=============================================================================
 * Geometric certificates for a composite objective f = g + h near its
 * minimizers, each scoped to an explicit domain D:
 *
 *   conditioned(p, y):   (y/p) dist(x, argmin)^p <= f(x) - inf f      on D
 *   subregular(p, y'):   y' dist(x, argmin)^(p-1) <= dist(0, df(x))   on D
 *   lojasiewicz(p, c):   (f(x) - inf f)^(1-1/p) <= c dist(0, df(x))   on D
 *
 * with the forward chain
 *
 *   conditioned(p, y)  ->  subregular(p, y/p)  ->  lojasiewicz(p, (y/p)^(-1/p))
 *
 * and the reverse step lojasiewicz(p, c) -> conditioned(p, c^(-p) p^(1-p)),
 * which is only valid on a region the iteration cannot leave, so it demands
 * an invariance attestation for the same domain.
 *
 * Exact constants are emitted for the model families (quadratics and least
 * squares: p = 2, y = smallest positive eigenvalue; w||x||^p: y = p w and
 * c = w^(-1/p)/p, both tight; a||x||_1: p = 1, y = a, c = 1/a; the 1-D
 * tail profile x^(-a): p = -a, c = 1/a on the tail halfspace).  Sampled
 * estimators bound the same constants from the unsound side and are labeled
 * estimated; every certificate can be re-audited against fresh samples.
 *===========================================================================*/
#pragma once

#include <algorithm>
#include <functional>

#include "core.hpp"
#include "funcs.hpp"
#include "solver.hpp"

namespace geofb {

/*---------------------------------------------------------------- domains --*/

struct DomainDesc {
    enum class Kind {
        whole_space, ball, sublevel, ball_and_sublevel, halfspace,
        support_subspace, cone_s_sparse, source_set, custom
    };
    Kind kind = Kind::whole_space;
    vec center;             /* ball / ball_and_sublevel */
    double radius = 1.0;
    double level = 0.0;     /* sublevel / ball_and_sublevel: f <= level */
    vec normal;             /* halfspace: <normal, x> <= offset */
    double offset = 0.0;
    SupportSet support;     /* support_subspace */
    int sparsity = 0;       /* cone_s_sparse */
    double mu = 0.0;        /* source_set: x = xbar + (A*A)^mu w, ||w|| <= delta */
    double delta = 0.0;
    std::string label;      /* custom */
    std::function<bool(const CompositeProblem&, const vec&)> member;   /* custom */
    std::function<vec(const CompositeProblem&, rng&)> sampler;         /* custom */
};

inline DomainDesc whole_space_domain()
{
    DomainDesc d;
    d.kind = DomainDesc::Kind::whole_space;
    return d;
}

inline DomainDesc ball_domain(const vec& center, double radius)
{
    if (!(radius > 0.0)) { throw std::invalid_argument("ball_domain: radius must be > 0"); }
    DomainDesc d;
    d.kind = DomainDesc::Kind::ball;
    d.center = center;
    d.radius = radius;
    return d;
}

inline DomainDesc sublevel_domain(double level)
{
    DomainDesc d;
    d.kind = DomainDesc::Kind::sublevel;
    d.level = level;
    return d;
}

inline DomainDesc halfspace_domain(const vec& normal, double offset)
{
    if (nrm2(normal) == 0.0) { throw std::invalid_argument("halfspace_domain: zero normal"); }
    DomainDesc d;
    d.kind = DomainDesc::Kind::halfspace;
    d.normal = normal;
    d.offset = offset;
    return d;
}

inline DomainDesc support_domain(const SupportSet& s)
{
    DomainDesc d;
    d.kind = DomainDesc::Kind::support_subspace;
    d.support = s;
    return d;
}

inline DomainDesc sparse_cone_domain(int s)
{
    if (s < 1) { throw std::invalid_argument("sparse_cone_domain: s must be >= 1"); }
    DomainDesc d;
    d.kind = DomainDesc::Kind::cone_s_sparse;
    d.sparsity = s;
    return d;
}

inline DomainDesc source_set_domain(double mu, double delta)
{
    if (!(delta > 0.0)) { throw std::invalid_argument("source_set_domain: delta must be > 0"); }
    DomainDesc d;
    d.kind = DomainDesc::Kind::source_set;
    d.mu = mu;
    d.delta = delta;
    return d;
}

inline DomainDesc custom_domain(std::string label,
                                std::function<bool(const CompositeProblem&, const vec&)> member,
                                std::function<vec(const CompositeProblem&, rng&)> sampler)
{
    DomainDesc d;
    d.kind = DomainDesc::Kind::custom;
    d.label = std::move(label);
    d.member = std::move(member);
    d.sampler = std::move(sampler);
    return d;
}

namespace detail {

inline const LinearOperator& problem_operator(const CompositeProblem& P, const char* who)
{
    if (P.h.kind != SmoothFn::Kind::least_squares) {
        throw std::invalid_argument(std::string(who) + ": needs a least-squares smooth part");
    }
    return P.h.A;
}

} // namespace detail

inline bool domain_contains(const DomainDesc& d, const CompositeProblem& P, const vec& x)
{
    switch (d.kind) {
    case DomainDesc::Kind::whole_space:
        return true;
    case DomainDesc::Kind::ball:
        return dist2(x, d.center) <= d.radius*(1.0 + 1e-12);
    case DomainDesc::Kind::sublevel:
        return objective(P, x) <= d.level + 1e-12*std::max(1.0, std::fabs(d.level));
    case DomainDesc::Kind::ball_and_sublevel:
        return dist2(x, d.center) <= d.radius*(1.0 + 1e-12)
            && objective(P, x) <= d.level + 1e-12*std::max(1.0, std::fabs(d.level));
    case DomainDesc::Kind::halfspace:
        return dot(d.normal, x) <= d.offset + 1e-12*std::max(1.0, std::fabs(d.offset));
    case DomainDesc::Kind::support_subspace: {
        for (std::size_t i = 0; i < x.size(); i++) {
            if (x[i] != 0.0) {
                bool in = false;
                for (int k : d.support.indices) { if (k == static_cast<int>(i)) { in = true; break; } }
                if (!in) { return false; }
            }
        }
        return true;
    }
    case DomainDesc::Kind::cone_s_sparse: {
        int nz = 0;
        for (double v : x) { if (v != 0.0) { nz++; } }
        return nz <= d.sparsity;
    }
    case DomainDesc::Kind::source_set: {
        const auto& A = detail::problem_operator(P, "source_set membership");
        if (!std::holds_alternative<DiagonalOperator>(A)) {
            throw std::invalid_argument("source_set membership: diagonal operators only");
        }
        const auto& sig = std::get<DiagonalOperator>(A).sigmas;
        if (!P.argmin.available()) { return false; }
        const vec r = vsub(x, P.argmin.xbar);
        double w2 = 0.0;
        for (std::size_t k = 0; k < r.size(); k++) {
            if (r[k] == 0.0) { continue; }
            if (sig[k] == 0.0) { return false; }
            const double wk = r[k]*std::pow(sig[k]*sig[k], -d.mu);
            w2 += wk*wk;
            if (w2 > 1e300) { return false; }
        }
        return std::sqrt(w2) <= d.delta*(1.0 + 1e-12);
    }
    case DomainDesc::Kind::custom:
        return d.member(P, x);
    }
    return false;
}

namespace detail {

/* anchor for samplers: a minimizer when one is known */
inline vec domain_anchor(const CompositeProblem& P)
{
    if (P.argmin.available()) { return P.argmin.project(vec(P.dim, 0.0)); }
    return vec(P.dim, 0.0);
}

inline vec sample_ball_uniform(rng& r, const vec& center, double radius)
{
    vec z = r.gaussian_vec(center.size());
    const double nz = nrm2(z);
    if (nz == 0.0) { return center; }
    vec x = center;
    const double u = std::pow(r.uniform01(), 1.0/static_cast<double>(center.size()));
    axpy(radius*u/nz, z, x);
    return x;
}

/* gaussian direction, log-uniform radius in [1e-4, 10] * scale: probes both
 * the near field (where conditioning binds) and the far field */
inline vec sample_log_radial(rng& r, const vec& center, double scale)
{
    vec z = r.gaussian_vec(center.size());
    const double nz = nrm2(z);
    if (nz == 0.0) { return center; }
    const double rad = scale*std::pow(10.0, r.uniform(-4.0, 1.0));
    vec x = center;
    axpy(rad/nz, z, x);
    return x;
}

inline vec rejection_sample(const DomainDesc& d, const CompositeProblem& P, rng& r,
                            const vec& anchor)
{
    double R = 1.0;
    long proposals = 0, since_grow = 0, hits = 0;
    for (;;) {
        vec x = anchor;
        for (int k = 0; k < P.dim; k++) { x[k] += r.uniform(-R, R); }
        proposals++;
        since_grow++;
        if (domain_contains(d, P, x)) { return x; }
        if (since_grow >= 1000 && hits < 10) {
            R *= 2.0;
            since_grow = 0;
            hits = 0;
        }
        if (proposals >= 100000) {
            throw std::runtime_error("domain_sample: rejection sampling found no point");
        }
    }
}

} // namespace detail

inline vec domain_sample(const DomainDesc& d, const CompositeProblem& P, rng& r)
{
    const vec anchor = detail::domain_anchor(P);
    const double scale = std::max(1.0, nrm2(anchor));
    switch (d.kind) {
    case DomainDesc::Kind::whole_space:
        return detail::sample_log_radial(r, anchor, scale);
    case DomainDesc::Kind::ball:
        return detail::sample_ball_uniform(r, d.center, d.radius);
    case DomainDesc::Kind::halfspace: {
        /* inward log-radial from the face through the anchor's projection */
        const double n2 = dot(d.normal, d.normal);
        vec base = anchor;
        const double excess = dot(d.normal, base) - d.offset;
        if (excess > 0.0) { axpy(-excess/n2, d.normal, base); }  /* project onto D */
        vec x = detail::sample_log_radial(r, base, scale);
        const double over = dot(d.normal, x) - d.offset;
        if (over > 0.0) { axpy(-2.0*over/n2, d.normal, x); }     /* reflect inside */
        return x;
    }
    case DomainDesc::Kind::support_subspace: {
        vec x(P.dim, 0.0);
        vec anc = anchor;
        vec z(P.dim, 0.0);
        double nz = 0.0;
        for (int k : d.support.indices) {
            z[k] = r.gaussian();
            nz += z[k]*z[k];
        }
        nz = std::sqrt(nz);
        const double rad = scale*std::pow(10.0, r.uniform(-4.0, 1.0));
        for (int k : d.support.indices) { x[k] = anc[k] + (nz > 0.0 ? rad*z[k]/nz : 0.0); }
        return x;
    }
    case DomainDesc::Kind::cone_s_sparse: {
        /* random support of exactly s coordinates, log-radial around 0 */
        std::vector<int> idx(P.dim);
        for (int k = 0; k < P.dim; k++) { idx[k] = k; }
        for (int k = 0; k < d.sparsity; k++) {
            const std::size_t j = k + r.uniform_index(idx.size() - k);
            std::swap(idx[k], idx[j]);
        }
        vec x(P.dim, 0.0);
        double nz = 0.0;
        for (int k = 0; k < d.sparsity; k++) {
            x[idx[k]] = r.gaussian();
            nz += x[idx[k]]*x[idx[k]];
        }
        nz = std::sqrt(nz);
        if (nz == 0.0) { return x; }
        const double rad = std::pow(10.0, r.uniform(-4.0, 1.0));
        for (int k = 0; k < d.sparsity; k++) { x[idx[k]] *= rad/nz; }
        return x;
    }
    case DomainDesc::Kind::source_set: {
        const auto& A = detail::problem_operator(P, "source_set sampler");
        if (!std::holds_alternative<DiagonalOperator>(A)) {
            throw std::invalid_argument("source_set sampler: diagonal operators only");
        }
        if (!P.argmin.available()) {
            throw std::logic_error("source_set sampler: needs an argmin oracle");
        }
        const vec w = detail::sample_ball_uniform(r, vec(P.dim, 0.0), d.delta);
        vec x = P.argmin.xbar;
        const vec sw = op_apply(LinearOperator{spectral_power(A, d.mu)}, w);
        for (int k = 0; k < P.dim; k++) { x[k] += sw[k]; }
        return x;
    }
    case DomainDesc::Kind::sublevel:
    case DomainDesc::Kind::ball_and_sublevel:
        return detail::rejection_sample(d, P, r, anchor);
    case DomainDesc::Kind::custom:
        return d.sampler(P, r);
    }
    throw std::logic_error("domain_sample: unhandled kind");
}

inline std::string domain_describe(const DomainDesc& d)
{
    switch (d.kind) {
    case DomainDesc::Kind::whole_space:     return "whole_space";
    case DomainDesc::Kind::ball:            return "ball(r=" + fmt17(d.radius) + ")";
    case DomainDesc::Kind::sublevel:        return "sublevel(" + fmt17(d.level) + ")";
    case DomainDesc::Kind::ball_and_sublevel:
        return "ball_and_sublevel(r=" + fmt17(d.radius) + ",level=" + fmt17(d.level) + ")";
    case DomainDesc::Kind::halfspace:       return "halfspace(offset=" + fmt17(d.offset) + ")";
    case DomainDesc::Kind::support_subspace: {
        std::string s = "support{";
        for (std::size_t i = 0; i < d.support.indices.size(); i++) {
            if (i) { s += ","; }
            s += std::to_string(d.support.indices[i]);
        }
        return s + "}";
    }
    case DomainDesc::Kind::cone_s_sparse:   return "cone(s=" + std::to_string(d.sparsity) + ")";
    case DomainDesc::Kind::source_set:
        return "source(mu=" + fmt17(d.mu) + ",delta=" + fmt17(d.delta) + ")";
    case DomainDesc::Kind::custom:          return "custom:" + d.label;
    }
    return "?";
}

/*----------------------------------------------------------- certificates --*/

struct GeometryCertificate {
    enum class Kind { conditioned, subregular, lojasiewicz };
    Kind kind = Kind::conditioned;
    double p = 2.0;
    double constant = 0.0;
    DomainDesc domain;
    std::string provenance;
    bool estimated = false;
    long samples = 0;       /* sample count behind an estimate, 0 for exact */
};

namespace detail {

inline void validate_cert_params(GeometryCertificate::Kind kind, double p, double constant)
{
    if (!(constant > 0.0)) {
        throw std::invalid_argument("certificate: constant must be > 0");
    }
    if (kind == GeometryCertificate::Kind::lojasiewicz) {
        if (!(p >= 1.0 || p < 0.0)) {
            throw std::invalid_argument("certificate: lojasiewicz needs p >= 1 or p < 0");
        }
    } else if (!(p >= 1.0)) {
        throw std::invalid_argument("certificate: p must be >= 1");
    }
}

} // namespace detail

inline GeometryCertificate make_certificate(GeometryCertificate::Kind kind, double p,
                                            double constant, DomainDesc domain,
                                            std::string provenance,
                                            bool estimated = false, long samples = 0)
{
    detail::validate_cert_params(kind, p, constant);
    GeometryCertificate c;
    c.kind = kind;
    c.p = p;
    c.constant = constant;
    c.domain = std::move(domain);
    c.provenance = std::move(provenance);
    c.estimated = estimated;
    c.samples = samples;
    return c;
}

/*-------------------------------------------------------------- exact certs */

/* tight constants for the model families this library ships */
inline std::vector<GeometryCertificate> exact_certificates(const CompositeProblem& P)
{
    using K = GeometryCertificate::Kind;
    std::vector<GeometryCertificate> out;

    const bool quad_like =
        P.g.kind == ProxFn::Kind::zero
        && (P.h.kind == SmoothFn::Kind::least_squares || P.h.kind == SmoothFn::Kind::quadratic);
    if (quad_like) {
        /* smallest positive eigenvalue of the Hessian A*A (resp. Q) */
        vec evs;
        if (P.h.kind == SmoothFn::Kind::least_squares) {
            evs = gram_eig(P.h.A).values;
        } else if (std::holds_alternative<DiagonalOperator>(P.h.Q)) {
            evs = std::get<DiagonalOperator>(P.h.Q).sigmas;
        } else {
            const auto& d = std::get<DenseOperator>(P.h.Q);
            evs = jacobi_sym_eig(d.entries, d.cols, false).values;
        }
        double gamma = 0.0;
        const double top = *std::max_element(evs.begin(), evs.end());
        for (double v : evs) {
            if (v > 1e-12*std::max(top, 1e-300) && (gamma == 0.0 || v < gamma)) { gamma = v; }
        }
        if (gamma > 0.0) {
            out.push_back(make_certificate(K::conditioned, 2.0, gamma,
                                           whole_space_domain(), "exact:quadratic"));
            out.push_back(make_certificate(K::lojasiewicz, 2.0, 1.0/std::sqrt(2.0*gamma),
                                           whole_space_domain(), "exact:quadratic"));
        }
        return out;
    }

    if (P.g.kind == ProxFn::Kind::norm_pow && P.h.kind == SmoothFn::Kind::zero) {
        const double p = P.g.p, w = P.g.weight;
        out.push_back(make_certificate(K::conditioned, p, p*w,
                                       whole_space_domain(), "exact:norm_pow"));
        out.push_back(make_certificate(K::subregular, p, p*w,
                                       whole_space_domain(), "exact:norm_pow"));
        out.push_back(make_certificate(K::lojasiewicz, p, std::pow(w, -1.0/p)/p,
                                       whole_space_domain(), "exact:norm_pow"));
        return out;
    }

    if (P.g.kind == ProxFn::Kind::l1 && P.h.kind == SmoothFn::Kind::zero) {
        out.push_back(make_certificate(K::conditioned, 1.0, P.g.alpha,
                                       whole_space_domain(), "exact:l1"));
        out.push_back(make_certificate(K::lojasiewicz, 1.0, 1.0/P.g.alpha,
                                       whole_space_domain(), "exact:l1"));
        return out;
    }

    if (P.h.kind == SmoothFn::Kind::scalar_power_tail && P.g.kind == ProxFn::Kind::zero) {
        /* x^(-a) on the tail x >= 1: exponent relation gives p = -a, c = 1/a */
        const double a = P.h.alpha;
        out.push_back(make_certificate(K::lojasiewicz, -a, 1.0/a,
                                       halfspace_domain({-1.0}, -1.0), "exact:power_tail"));
        return out;
    }

    return out;
}

/*--------------------------------------------------------------- subregular */

/* norm_pow subregularity is tight: dist(0, dg) = w p ||x||^(p-1) */

/*-------------------------------------------------------------- conversions */

inline GeometryCertificate convert_forward(const GeometryCertificate& cert)
{
    using K = GeometryCertificate::Kind;
    if (cert.kind == K::conditioned) {
        GeometryCertificate out = cert;
        out.kind = K::subregular;
        out.constant = cert.constant/cert.p;
        out.provenance = "converted:" + cert.provenance;
        return out;
    }
    if (cert.kind == K::subregular) {
        GeometryCertificate out = cert;
        out.kind = K::lojasiewicz;
        out.constant = std::pow(cert.constant, -1.0/cert.p);
        out.provenance = "converted:" + cert.provenance;
        return out;
    }
    throw std::invalid_argument("convert_forward: lojasiewicz is the end of the chain");
}

/* evidence that the forward-backward map cannot leave the certificate's
 * domain, produced by the sampled invariance checker */
struct InvarianceAttestation {
    InvarianceReport report;
    std::string domain;
    double lambda = 0.0;
};

inline InvarianceAttestation attest_invariance(const CompositeProblem& P, double lambda,
                                               const DomainDesc& d,
                                               long n_samples = 2000,
                                               std::uint64_t seed = 0x1abe11ed)
{
    InvarianceAttestation att;
    att.domain = domain_describe(d);
    att.lambda = lambda;
    if (d.kind == DomainDesc::Kind::whole_space) {
        att.report.invariant = true;   /* vacuous */
        att.report.lambda = lambda;
        att.report.problem_hash = problem_hash(P);
        att.report.region = "whole_space";
        return att;
    }
    InvarianceRegion reg;
    switch (d.kind) {
    case DomainDesc::Kind::ball:
        reg.kind = InvarianceRegion::Kind::ball;
        reg.center = d.center;
        reg.radius = d.radius;
        break;
    case DomainDesc::Kind::sublevel:
        reg.kind = InvarianceRegion::Kind::sublevel;
        reg.level = d.level;
        break;
    case DomainDesc::Kind::halfspace:
        reg.kind = InvarianceRegion::Kind::halfspace;
        reg.normal = d.normal;
        reg.offset = d.offset;
        break;
    default:
        throw std::invalid_argument("attest_invariance: unsupported domain kind "
                                    + domain_describe(d));
    }
    att.report = check_fb_invariance(P, lambda, reg, n_samples, seed);
    return att;
}

inline GeometryCertificate convert_reverse_on_invariant(const GeometryCertificate& cert,
                                                        const InvarianceAttestation& att)
{
    if (cert.kind != GeometryCertificate::Kind::lojasiewicz) {
        throw std::invalid_argument("convert_reverse_on_invariant: lojasiewicz input only");
    }
    if (!(cert.p >= 1.0)) {
        throw std::invalid_argument("convert_reverse_on_invariant: needs p >= 1");
    }
    if (!att.report.invariant) {
        throw std::invalid_argument("convert_reverse_on_invariant: attestation reports "
                                    "an escape from " + att.domain);
    }
    if (att.domain != domain_describe(cert.domain)) {
        throw std::invalid_argument("convert_reverse_on_invariant: attestation covers '"
                                    + att.domain + "', certificate lives on '"
                                    + domain_describe(cert.domain) + "'");
    }
    GeometryCertificate out = cert;
    out.kind = GeometryCertificate::Kind::conditioned;
    out.constant = std::pow(cert.constant, -cert.p)*std::pow(cert.p, 1.0 - cert.p);
    out.provenance = "reverse_on_invariant:" + cert.provenance;
    return out;
}

/*--------------------------------------------------------------- estimators */

/* p * (sampled min of gap/dist^p): approaches the best constant from above,
 * so the result may overclaim; it is marked estimated for that reason */
inline GeometryCertificate estimate_conditioning(const CompositeProblem& P,
                                                 const DomainDesc& d, double p,
                                                 long n_samples = 10000,
                                                 std::uint64_t seed = 0xe5717a7e)
{
    if (!(p >= 1.0)) { throw std::invalid_argument("estimate_conditioning: p must be >= 1"); }
    if (!P.argmin.available()) {
        throw std::logic_error("estimate_conditioning: needs an argmin oracle");
    }
    rng r(mix_seed(seed, "cond:" + domain_describe(d)));
    double min_ratio = inf;
    long used = 0;
    for (long s = 0; s < n_samples; s++) {
        const vec x = domain_sample(d, P, r);
        const double dist = P.argmin.distance(x);
        if (dist <= 1e-9) { continue; }
        const double gap = std::max(objective(P, x) - P.inf_value, 0.0);
        if (gap == inf) { continue; }
        min_ratio = std::min(min_ratio, gap/std::pow(dist, p));
        used++;
    }
    if (used == 0) {
        throw std::runtime_error("estimate_conditioning: no usable samples");
    }
    return make_certificate(GeometryCertificate::Kind::conditioned, p, p*min_ratio,
                            d, "estimated:from_above", true, used);
}

/* sampled max of gap^(1-1/p)/resid: approaches the best constant from
 * below, so the certificate may underclaim; marked estimated */
inline GeometryCertificate estimate_lojasiewicz(const CompositeProblem& P,
                                                const DomainDesc& d, double p,
                                                long n_samples = 10000,
                                                std::uint64_t seed = 0x10ca1e57)
{
    if (!(p >= 1.0 || p < 0.0)) {
        throw std::invalid_argument("estimate_lojasiewicz: p must be >= 1 or < 0");
    }
    rng r(mix_seed(seed, "loja:" + domain_describe(d)));
    const double expo = 1.0 - 1.0/p;
    double max_ratio = 0.0;
    long used = 0;
    for (long s = 0; s < n_samples; s++) {
        const vec x = domain_sample(d, P, r);
        const double gap = objective(P, x) - P.inf_value;
        if (!(gap > 0.0) || gap == inf) { continue; }
        const double resid = detail::safe_resid(P, x);
        if (!(resid > 1e-12) || resid == inf) { continue; }
        max_ratio = std::max(max_ratio, std::pow(gap, expo)/resid);
        used++;
    }
    if (used == 0) {
        throw std::runtime_error("estimate_lojasiewicz: no usable samples");
    }
    return make_certificate(GeometryCertificate::Kind::lojasiewicz, p, max_ratio,
                            d, "estimated:from_below", true, used);
}

/*-------------------------------------------------------------- ellipticity */

struct EllipticityReport {
    double gamma = 0.0;     /* min of ||A r||^2/||r||^2 over admissible r */
    bool exact = false;
    long samples = 0;
};

/* restricted positivity of the normal operator A*A over a domain's
 * directions; exact by enumeration on supports and sparsity cones */
inline EllipticityReport ellipticity_check(const CompositeProblem& P, const DomainDesc& d,
                                           long n_samples = 10000,
                                           std::uint64_t seed = 0xe1117)
{
    const auto& A = detail::problem_operator(P, "ellipticity_check");
    EllipticityReport rep;
    if (d.kind == DomainDesc::Kind::support_subspace) {
        rep.gamma = support_min_eig(A, d.support);
        rep.exact = true;
        return rep;
    }
    if (d.kind == DomainDesc::Kind::cone_s_sparse) {
        rep.gamma = restricted_min_eig(A, d.sparsity);
        rep.exact = true;
        return rep;
    }
    if (!P.argmin.available()) {
        throw std::logic_error("ellipticity_check: sampled path needs an argmin oracle");
    }
    rng r(mix_seed(seed, "ellipticity:" + domain_describe(d)));
    rep.gamma = inf;
    for (long s = 0; s < n_samples; s++) {
        const vec x = domain_sample(d, P, r);
        const vec rdir = vsub(x, P.argmin.project(x));
        const double nr = nrm2(rdir);
        if (nr <= 1e-12) { continue; }
        const vec ar = op_apply(A, rdir);
        rep.gamma = std::min(rep.gamma, dot(ar, ar)/(nr*nr));
        rep.samples++;
    }
    if (rep.samples == 0) {
        throw std::runtime_error("ellipticity_check: no usable samples");
    }
    return rep;
}

/* an elliptic normal operator on the domain gives quadratic conditioning
 * there (l1 composites: the nonsmooth part only adds nonnegative slack) */
inline GeometryCertificate conditioning_from_ellipticity(const CompositeProblem& P,
                                                         const DomainDesc& d,
                                                         const EllipticityReport& ell)
{
    detail::problem_operator(P, "conditioning_from_ellipticity");
    if (!(ell.gamma > 0.0)) {
        throw std::invalid_argument("conditioning_from_ellipticity: gamma must be > 0 "
                                    "(operator is not injective on the domain)");
    }
    return make_certificate(GeometryCertificate::Kind::conditioned, 2.0, ell.gamma, d,
                            ell.exact ? "ellipticity:exact" : "ellipticity:sampled",
                            !ell.exact, ell.samples);
}

/*------------------------------------------------------ hierarchy / audits --*/

namespace detail {

/* structural subset rules; fall back to sampling when none applies */
inline bool domain_subset(const DomainDesc& small, const DomainDesc& big,
                          const CompositeProblem& P, bool& structural)
{
    using K = DomainDesc::Kind;
    structural = true;
    if (big.kind == K::whole_space) { return true; }
    if (small.kind == K::ball && big.kind == K::ball) {
        return dist2(small.center, big.center) + small.radius <= big.radius*(1.0 + 1e-12);
    }
    if (small.kind == K::sublevel && big.kind == K::sublevel) {
        return small.level <= big.level;
    }
    if (small.kind == K::support_subspace && big.kind == K::cone_s_sparse) {
        return static_cast<int>(small.support.indices.size()) <= big.sparsity;
    }
    if (small.kind == K::support_subspace && big.kind == K::support_subspace) {
        for (int k : small.support.indices) {
            bool in = false;
            for (int j : big.support.indices) { if (j == k) { in = true; break; } }
            if (!in) { return false; }
        }
        return true;
    }
    if (small.kind == K::cone_s_sparse && big.kind == K::cone_s_sparse) {
        return small.sparsity <= big.sparsity;
    }
    if (small.kind == K::halfspace && big.kind == K::halfspace) {
        /* same direction, smaller offset */
        const double nn = nrm2(small.normal)*nrm2(big.normal);
        if (std::fabs(dot(small.normal, big.normal) - nn) <= 1e-12*nn) {
            return small.offset/nrm2(small.normal) <= big.offset/nrm2(big.normal) + 1e-12;
        }
        return false;
    }
    structural = false;
    rng r(mix_seed(0x5b5e7, "subset"));
    for (int s = 0; s < 1000; s++) {
        const vec x = domain_sample(small, P, r);
        if (!domain_contains(big, P, x)) { return false; }
    }
    return true;
}

} // namespace detail

/* re-scope a certificate to a smaller domain (monotone restriction) */
inline GeometryCertificate hierarchy_restrict(const GeometryCertificate& cert,
                                              const DomainDesc& smaller,
                                              const CompositeProblem& P)
{
    bool structural = false;
    if (!detail::domain_subset(smaller, cert.domain, P, structural)) {
        throw std::invalid_argument("hierarchy_restrict: '" + domain_describe(smaller)
                                    + "' is not contained in '"
                                    + domain_describe(cert.domain) + "'");
    }
    GeometryCertificate out = cert;
    out.domain = smaller;
    out.provenance = cert.provenance + (structural ? "+restricted" : "+restricted_sampled");
    if (!structural) { out.estimated = true; }
    return out;
}

struct CertificateCheck {
    bool sound = true;
    long samples = 0;
    long violations = 0;
    double worst_violation = 0.0;   /* largest lhs - rhs overshoot */
    vec witness;
};

/* audit a certificate's inequality on fresh samples from its domain */
inline CertificateCheck check_certificate(const CompositeProblem& P,
                                          const GeometryCertificate& cert,
                                          long n_samples = 10000,
                                          std::uint64_t seed = 0xc3a7f00d,
                                          double tol = 1e-10)
{
    using K = GeometryCertificate::Kind;
    if (cert.kind != K::lojasiewicz && !P.argmin.available()) {
        throw std::logic_error("check_certificate: distance-based kinds need an argmin oracle");
    }
    rng r(mix_seed(seed, "audit:" + domain_describe(cert.domain)));
    CertificateCheck chk;
    for (long s = 0; s < n_samples; s++) {
        const vec x = domain_sample(cert.domain, P, r);
        const double gap = objective(P, x) - P.inf_value;
        if (gap == inf) { continue; }
        double lhs = 0.0, rhs = 0.0, scale = 1.0;
        if (cert.kind == K::conditioned) {
            const double dist = P.argmin.distance(x);
            lhs = (cert.constant/cert.p)*std::pow(dist, cert.p);
            rhs = gap;
        } else if (cert.kind == K::subregular) {
            const double dist = P.argmin.distance(x);
            const double resid = detail::safe_resid(P, x);
            if (resid == inf) { continue; }
            lhs = cert.constant*std::pow(dist, cert.p - 1.0);
            rhs = resid;
        } else {
            if (!(gap > 0.0)) { continue; }   /* inequality scoped off the argmin set */
            const double resid = detail::safe_resid(P, x);
            if (resid == inf) { continue; }
            lhs = std::pow(gap, 1.0 - 1.0/cert.p);
            rhs = cert.constant*resid;
        }
        chk.samples++;
        scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
        const double overshoot = lhs - rhs;
        if (overshoot > tol*scale) {
            chk.violations++;
            if (overshoot > chk.worst_violation) {
                chk.worst_violation = overshoot;
                chk.witness = x;
            }
            chk.sound = false;
        }
    }
    if (chk.samples == 0) {
        throw std::runtime_error("check_certificate: no usable samples");
    }
    return chk;
}

/* declared Lipschitz modulus and gradient monotonicity, spot-checked */
struct SmoothnessReport {
    bool lipschitz_ok = true;
    bool monotone_ok = true;
    double max_ratio = 0.0;   /* max ||grad dx|| / ||dx|| seen, vs L */
};

inline SmoothnessReport spot_check_smoothness(const CompositeProblem& P,
                                              long n_samples = 2000,
                                              std::uint64_t seed = 0x5300074)
{
    rng r(mix_seed(seed, "smoothness"));
    SmoothnessReport rep;
    const vec anchor = detail::domain_anchor(P);
    for (long s = 0; s < n_samples; s++) {
        const vec x = detail::sample_log_radial(r, anchor, 1.0);
        const vec y = detail::sample_log_radial(r, anchor, 1.0);
        const double dxy = dist2(x, y);
        if (dxy <= 1e-12) { continue; }
        const vec gx = P.h.grad(x);
        const vec gy = P.h.grad(y);
        const double ratio = dist2(gx, gy)/dxy;
        rep.max_ratio = std::max(rep.max_ratio, ratio);
        if (P.h.lipschitz > 0.0 && ratio > P.h.lipschitz*(1.0 + 1e-9)) {
            rep.lipschitz_ok = false;
        }
        if (P.h.lipschitz == 0.0 && ratio > 1e-9) {
            rep.lipschitz_ok = false;   /* declared constant, gradient is not */
        }
        if (dot(vsub(gx, gy), vsub(x, y)) < -1e-10*std::max(1.0, dxy)) {
            rep.monotone_ok = false;    /* convexity violated */
        }
    }
    return rep;
}

/* Smoothness caps how sharp conditioning can be.  When the gradient is
 * alpha-Holder with constant L on a convex set containing the minimizers,
 *
 *     f(x) - inf f <= L/(1+alpha) * dist(x, argmin)^{1+alpha},
 *
 * so a (gamma, p)-conditioning certificate on that set forces p >= alpha+1,
 * and in the borderline case p = alpha+1 additionally gamma <= L.  The
 * caller attests differentiability and the Holder data; this is the pure
 * exponent/constant consistency check. */
struct SmoothnessConsistency {
    bool ok = true;
    std::string reason;
};

inline SmoothnessConsistency validate_smoothness_consistency(const GeometryCertificate& cert,
                                                             double alpha, double L_holder)
{
    if (cert.kind != GeometryCertificate::Kind::conditioned) {
        throw std::invalid_argument("validate_smoothness_consistency: conditioned "
                                    "certificates only");
    }
    if (!(alpha > 0.0) || !(alpha <= 1.0)) {
        throw std::invalid_argument("validate_smoothness_consistency: Holder exponent "
                                    "must lie in ]0,1]");
    }
    if (!(L_holder > 0.0)) {
        throw std::invalid_argument("validate_smoothness_consistency: Holder constant "
                                    "must be positive");
    }
    SmoothnessConsistency out;
    const double edge = alpha + 1.0;
    if (cert.p < edge*(1.0 - 1e-12)) {
        out.ok = false;
        out.reason = "conditioning exponent p is below alpha + 1";
    } else if (cert.p <= edge*(1.0 + 1e-12) && cert.constant > L_holder*(1.0 + 1e-12)) {
        out.ok = false;
        out.reason = "p = alpha + 1 requires gamma <= the Holder constant";
    }
    return out;
}

/*------------------------------------------------------------------ JSON --*/

inline nlohmann::json domain_to_json(const DomainDesc& d)
{
    nlohmann::json j;
    switch (d.kind) {
    case DomainDesc::Kind::whole_space:
        j["kind"] = "whole_space";
        break;
    case DomainDesc::Kind::ball:
        j["kind"] = "ball";
        j["center"] = d.center;
        j["radius"] = d.radius;
        break;
    case DomainDesc::Kind::sublevel:
        j["kind"] = "sublevel";
        j["level"] = d.level;
        break;
    case DomainDesc::Kind::ball_and_sublevel:
        j["kind"] = "ball_and_sublevel";
        j["center"] = d.center;
        j["radius"] = d.radius;
        j["level"] = d.level;
        break;
    case DomainDesc::Kind::halfspace:
        j["kind"] = "halfspace";
        j["normal"] = d.normal;
        j["offset"] = d.offset;
        break;
    case DomainDesc::Kind::support_subspace:
        j["kind"] = "support_subspace";
        j["support"] = d.support.indices;
        break;
    case DomainDesc::Kind::cone_s_sparse:
        j["kind"] = "cone_s_sparse";
        j["s"] = d.sparsity;
        break;
    case DomainDesc::Kind::source_set:
        j["kind"] = "source_set";
        j["mu"] = d.mu;
        j["delta"] = d.delta;
        break;
    case DomainDesc::Kind::custom:
        throw std::invalid_argument("domain_to_json: custom domains are not serializable");
    }
    return j;
}

inline DomainDesc domain_from_json(const nlohmann::json& j)
{
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "whole_space") { return whole_space_domain(); }
    if (kind == "ball") {
        return ball_domain(j.at("center").get<vec>(), j.at("radius").get<double>());
    }
    if (kind == "sublevel") { return sublevel_domain(j.at("level").get<double>()); }
    if (kind == "ball_and_sublevel") {
        DomainDesc d = ball_domain(j.at("center").get<vec>(), j.at("radius").get<double>());
        d.kind = DomainDesc::Kind::ball_and_sublevel;
        d.level = j.at("level").get<double>();
        return d;
    }
    if (kind == "halfspace") {
        return halfspace_domain(j.at("normal").get<vec>(), j.at("offset").get<double>());
    }
    if (kind == "support_subspace") {
        SupportSet s;
        s.indices = j.at("support").get<std::vector<int>>();
        return support_domain(s);
    }
    if (kind == "cone_s_sparse") { return sparse_cone_domain(j.at("s").get<int>()); }
    if (kind == "source_set") {
        return source_set_domain(j.at("mu").get<double>(), j.at("delta").get<double>());
    }
    throw std::invalid_argument("domain_from_json: unknown kind '" + kind + "'");
}

inline nlohmann::json certificate_to_json(const GeometryCertificate& c)
{
    nlohmann::json j;
    switch (c.kind) {
    case GeometryCertificate::Kind::conditioned: j["kind"] = "conditioned"; break;
    case GeometryCertificate::Kind::subregular:  j["kind"] = "subregular"; break;
    case GeometryCertificate::Kind::lojasiewicz: j["kind"] = "lojasiewicz"; break;
    }
    j["p"] = c.p;
    j["constant"] = c.constant;
    j["domain"] = domain_to_json(c.domain);
    j["provenance"] = c.provenance;
    j["estimated"] = c.estimated;
    j["samples"] = c.samples;
    return j;
}

inline GeometryCertificate certificate_from_json(const nlohmann::json& j)
{
    const std::string kind = j.at("kind").get<std::string>();
    GeometryCertificate::Kind k;
    if (kind == "conditioned") { k = GeometryCertificate::Kind::conditioned; }
    else if (kind == "subregular") { k = GeometryCertificate::Kind::subregular; }
    else if (kind == "lojasiewicz") { k = GeometryCertificate::Kind::lojasiewicz; }
    else { throw std::invalid_argument("certificate_from_json: unknown kind '" + kind + "'"); }
    GeometryCertificate c = make_certificate(k, j.at("p").get<double>(),
                                             j.at("constant").get<double>(),
                                             domain_from_json(j.at("domain")),
                                             j.at("provenance").get<std::string>(),
                                             j.value("estimated", false),
                                             j.value("samples", 0L));
    return c;
}

} // namespace geofb
