/* Certificates: exact constants against closed-form models, estimator
 * sharpness on homogeneous objectives (where the sampled ratio is constant,
 * so the estimate must hit the exact constant), conversion algebra round
 * trips, domain samplers against their own membership tests, audits that
 * accept sound certificates and refute inflated ones. */
#include <catch2/catch_amalgamated.hpp>

#include <geofb/geometry.hpp>

#include "oracles.hpp"

using namespace geofb;

namespace {

GeometryCertificate find_cert(const std::vector<GeometryCertificate>& certs,
                              GeometryCertificate::Kind kind)
{
    for (const auto& c : certs) {
        if (c.kind == kind) { return c; }
    }
    throw std::runtime_error("certificate kind not present");
}

CompositeProblem pure_l1(double alpha, int dim)
{
    CompositeProblem P;
    P.family = "custom";
    P.dim = dim;
    P.g.kind = ProxFn::Kind::l1;
    P.g.alpha = alpha;
    P.h.kind = SmoothFn::Kind::zero;
    P.inf_value = 0.0;
    P.argmin.kind = ArgminOracle::Kind::point;
    P.argmin.xbar = vec(dim, 0.0);
    return P;
}

DomainDesc annulus_domain(double r_lo, double r_hi)
{
    return custom_domain(
        "annulus",
        [=](const CompositeProblem&, const vec& x) {
            const double n = nrm2(x);
            return n >= r_lo && n <= r_hi;
        },
        [=](const CompositeProblem& P, rng& r) {
            vec z = r.gaussian_vec(P.dim);
            const double nz = nrm2(z);
            if (nz == 0.0) { z[0] = 1.0; }
            return scaled(z, r.uniform(r_lo, r_hi)/std::max(nz, 1e-300));
        });
}

} // namespace

TEST_CASE("every domain sampler stays inside its own membership test")
{
    rng r(mix_seed(31, "domains"));

    SECTION("generic kinds on a least-squares problem") {
        const auto P = make_least_squares(DiagonalOperator{{2.0, 1.0, 0.5}}, {2.0, 1.0, 0.5});
        std::vector<DomainDesc> domains = {
            whole_space_domain(),
            ball_domain({1.0, 1.0, 1.0}, 2.0),
            sublevel_domain(objective(P, {0.0, 0.0, 0.0}) + 1.0),
            halfspace_domain({1.0, 0.0, 0.0}, 3.0),
            sparse_cone_domain(2),
            source_set_domain(0.5, 1.0),
            annulus_domain(0.5, 2.0),
        };
        SupportSet s;
        s.indices = {0, 2};
        domains.push_back(support_domain(s));
        for (const auto& d : domains) {
            for (int k = 0; k < 300; k++) {
                const vec x = domain_sample(d, P, r);
                INFO(domain_describe(d));
                REQUIRE(domain_contains(d, P, x));
            }
        }
    }

    SECTION("source set membership round trip") {
        const auto P = make_least_squares(DiagonalOperator{{1.0, 0.5, 0.25}}, {1.0, 1.0, 1.0});
        const auto d = source_set_domain(0.5, 1.0);
        /* x = xbar + (A*A)^mu w with ||w|| = 1 exactly: on the boundary */
        vec x = P.argmin.xbar;
        x[1] += std::pow(0.25, 0.5);   /* sigma_1^(2 mu) * 1 */
        REQUIRE(domain_contains(d, P, x));
        x[1] += 0.1;
        REQUIRE_FALSE(domain_contains(d, P, x));
        /* kernel-direction displacements are never representable */
        const auto Pk = make_least_squares(DiagonalOperator{{1.0, 0.0}}, {1.0, 0.0});
        vec xk = Pk.argmin.xbar;
        xk[1] += 0.5;
        REQUIRE_FALSE(domain_contains(source_set_domain(0.5, 10.0), Pk, xk));
    }

    SECTION("ball and sublevel intersection falls back to rejection") {
        const auto P = make_quadratic(DiagonalOperator{{1.0, 1.0}}, {0.0, 0.0});
        DomainDesc d = ball_domain({0.5, 0.0}, 1.0);
        d.kind = DomainDesc::Kind::ball_and_sublevel;
        d.level = 0.3;
        for (int k = 0; k < 200; k++) {
            const vec x = domain_sample(d, P, r);
            REQUIRE(dist2(x, d.center) <= d.radius*(1.0 + 1e-12));
            REQUIRE(objective(P, x) <= d.level*(1.0 + 1e-9));
        }
    }
}

TEST_CASE("exact certificates for quadratic models")
{
    SECTION("diagonal with kernel: smallest positive eigenvalue") {
        const auto P = make_quadratic(DiagonalOperator{{4.0, 1.0, 0.0}}, {4.0, 1.0, 0.0});
        const auto certs = exact_certificates(P);
        const auto cond = find_cert(certs, GeometryCertificate::Kind::conditioned);
        REQUIRE(cond.p == 2.0);
        REQUIRE(cond.constant == 1.0);
        REQUIRE_FALSE(cond.estimated);
        const auto loja = find_cert(certs, GeometryCertificate::Kind::lojasiewicz);
        REQUIRE(std::fabs(loja.constant - 1.0/std::sqrt(2.0)) <= 1e-15);
        REQUIRE(check_certificate(P, cond, 5000).sound);
        REQUIRE(check_certificate(P, loja, 5000).sound);
    }

    SECTION("dense least squares: gamma matches the eigenvalue oracle") {
        rng r(mix_seed(32, "ls"));
        DenseOperator A;
        A.rows = 5;
        A.cols = 3;
        A.entries.resize(15);
        for (auto& e : A.entries) { e = r.uniform(-1.0, 1.0); }
        const auto P = make_least_squares(A, r.gaussian_vec(5));
        const auto cond = find_cert(exact_certificates(P),
                                    GeometryCertificate::Kind::conditioned);
        const vec evs = oracle::sym_eigenvalues(gram_matrix(A), 3);
        REQUIRE(std::fabs(cond.constant - evs[0]) <= 1e-9*std::max(1.0, evs[0]));
        REQUIRE(check_certificate(P, cond, 5000).sound);
    }

    SECTION("an inflated constant is refuted with a witness") {
        const auto P = make_quadratic(DiagonalOperator{{4.0, 1.0}}, {0.0, 0.0});
        const auto bad = make_certificate(GeometryCertificate::Kind::conditioned, 2.0,
                                          10.0, whole_space_domain(), "bogus");
        const auto chk = check_certificate(P, bad, 5000);
        REQUIRE_FALSE(chk.sound);
        REQUIRE(chk.violations > 0);
        REQUIRE(chk.worst_violation > 0.0);
        REQUIRE_FALSE(chk.witness.empty());
        /* the witness really violates: (10/2) dist^2 > gap there */
        const double dist = P.argmin.distance(chk.witness);
        REQUIRE(5.0*dist*dist > objective(P, chk.witness) - P.inf_value);
    }
}

TEST_CASE("homogeneous norms: exact constants, estimators recover them")
{
    const double p = 4.0, w = 0.7;
    const auto P = make_norm_pow(p, 2, w);
    const auto certs = exact_certificates(P);
    const auto cond = find_cert(certs, GeometryCertificate::Kind::conditioned);
    const auto loja = find_cert(certs, GeometryCertificate::Kind::lojasiewicz);
    REQUIRE(cond.constant == p*w);
    REQUIRE(std::fabs(loja.constant - std::pow(w, -0.25)/4.0) <= 1e-15);

    SECTION("sound on the whole space and on an annulus") {
        REQUIRE(check_certificate(P, cond, 4000).sound);
        REQUIRE(check_certificate(P, loja, 4000).sound);
        const auto restricted = hierarchy_restrict(cond, annulus_domain(0.5, 2.0), P);
        REQUIRE(check_certificate(P, restricted, 4000).sound);
    }

    SECTION("the gap/dist ratio is constant, so estimates are exact") {
        const auto est = estimate_conditioning(P, annulus_domain(0.5, 2.0), p, 4000);
        REQUIRE(est.estimated);
        REQUIRE(est.provenance == "estimated:from_above");
        REQUIRE(std::fabs(est.constant - p*w) <= 1e-10);
        const auto estl = estimate_lojasiewicz(P, annulus_domain(0.5, 2.0), p, 4000);
        REQUIRE(estl.provenance == "estimated:from_below");
        REQUIRE(std::fabs(estl.constant - loja.constant) <= 1e-10);
    }

    SECTION("off-exponent estimation on a bounded annulus stays finite") {
        /* true inf over the annulus of gap/dist^q at q > p sits on the outer
         * radius: w r^(p-q) at r = 2 */
        const auto Pq = make_norm_pow(2.0, 2, 1.0);
        const double q = 4.0;
        const auto est = estimate_conditioning(Pq, annulus_domain(0.5, 2.0), q, 20000);
        const double want = q*1.0*std::pow(2.0, 2.0 - q);
        REQUIRE(est.constant >= want - 1e-12);
        REQUIRE(est.constant <= want*1.01);
    }
}

TEST_CASE("pure l1: polyhedral first-order geometry")
{
    const auto P = pure_l1(0.8, 3);
    const auto certs = exact_certificates(P);
    const auto cond = find_cert(certs, GeometryCertificate::Kind::conditioned);
    const auto loja = find_cert(certs, GeometryCertificate::Kind::lojasiewicz);
    REQUIRE(cond.p == 1.0);
    REQUIRE(cond.constant == 0.8);
    REQUIRE(loja.constant == 1.25);
    REQUIRE(check_certificate(P, cond, 5000).sound);
    REQUIRE(check_certificate(P, loja, 5000).sound);

    /* gaussian samples keep every coordinate active, so the sampled ratio
     * sits at 1/(alpha sqrt(d)) < 1/alpha: a from-below estimate */
    const auto est = estimate_lojasiewicz(P, whole_space_domain(), 1.0, 3000);
    REQUIRE(std::fabs(est.constant - 1.0/(0.8*std::sqrt(3.0))) <= 1e-9);
    REQUIRE(est.constant < loja.constant);
}

TEST_CASE("tail counterexample: negative exponent on its invariant halfspace")
{
    const double a = 2.0;
    const auto P = make_counterexample_neg(a);
    const auto certs = exact_certificates(P);
    REQUIRE(certs.size() == 1);
    const auto& loja = certs[0];
    REQUIRE(loja.kind == GeometryCertificate::Kind::lojasiewicz);
    REQUIRE(loja.p == -a);
    REQUIRE(loja.constant == 0.5);
    REQUIRE(loja.domain.kind == DomainDesc::Kind::halfspace);

    REQUIRE(check_certificate(P, loja, 5000).sound);

    /* the ratio is identically 1/a on the tail, so the estimator is exact */
    const auto est = estimate_lojasiewicz(P, loja.domain, -a, 3000);
    REQUIRE(std::fabs(est.constant - 0.5) <= 1e-9);

    /* the tail halfspace is forward-invariant (the flow drifts right) */
    const auto att = attest_invariance(P, 0.1, loja.domain, 1000);
    REQUIRE(att.report.invariant);

    /* but reverse conversion is an order-p statement: refused for p < 0 */
    REQUIRE_THROWS_AS(convert_reverse_on_invariant(loja, att), std::invalid_argument);
}

TEST_CASE("conversion algebra")
{
    SECTION("forward chain constants") {
        const auto cond = make_certificate(GeometryCertificate::Kind::conditioned, 2.0,
                                           2.0, whole_space_domain(), "exact:test");
        const auto sub = convert_forward(cond);
        REQUIRE(sub.kind == GeometryCertificate::Kind::subregular);
        REQUIRE(sub.constant == 1.0);
        const auto loja = convert_forward(sub);
        REQUIRE(loja.kind == GeometryCertificate::Kind::lojasiewicz);
        REQUIRE(loja.constant == 1.0);
        REQUIRE_THROWS_AS(convert_forward(loja), std::invalid_argument);
    }

    SECTION("forward chain stays sound on a model") {
        const auto P = make_quadratic(DiagonalOperator{{3.0, 1.5}}, {0.0, 0.0});
        auto cert = find_cert(exact_certificates(P), GeometryCertificate::Kind::conditioned);
        cert = convert_forward(cert);
        REQUIRE(check_certificate(P, cert, 4000).sound);
        cert = convert_forward(cert);
        REQUIRE(check_certificate(P, cert, 4000).sound);
    }

    SECTION("reverse conversion is tight on homogeneous models") {
        /* w||x||^p: reverse of the exact sharp constant returns p w */
        const auto P = make_norm_pow(4.0, 2, 0.7);
        const auto loja = find_cert(exact_certificates(P),
                                    GeometryCertificate::Kind::lojasiewicz);
        const auto att = attest_invariance(P, 0.5, whole_space_domain());
        const auto back = convert_reverse_on_invariant(loja, att);
        REQUIRE(back.kind == GeometryCertificate::Kind::conditioned);
        REQUIRE(std::fabs(back.constant - 2.8) <= 1e-12);

        /* strongly convex quadratic: c = 1/sqrt(2 gamma) maps back to gamma */
        const auto Pq = make_quadratic(DiagonalOperator{{1.0, 5.0}}, {0.0, 0.0});
        const auto lq = find_cert(exact_certificates(Pq),
                                  GeometryCertificate::Kind::lojasiewicz);
        const auto aq = attest_invariance(Pq, 0.1, whole_space_domain());
        REQUIRE(std::fabs(convert_reverse_on_invariant(lq, aq).constant - 1.0) <= 1e-12);
    }

    SECTION("reverse conversion demands a matching, passing attestation") {
        const auto P = make_norm_pow(2.0, 2, 1.0);
        const auto loja = find_cert(exact_certificates(P),
                                    GeometryCertificate::Kind::lojasiewicz);

        /* escape reported: refused */
        InvarianceAttestation bad;
        bad.domain = "whole_space";
        bad.report.invariant = false;
        REQUIRE_THROWS_AS(convert_reverse_on_invariant(loja, bad), std::invalid_argument);

        /* attestation for a different domain: refused */
        const auto att_ball = attest_invariance(P, 0.5, ball_domain({0.0, 0.0}, 1.0));
        REQUIRE(att_ball.report.invariant);
        REQUIRE_THROWS_AS(convert_reverse_on_invariant(loja, att_ball),
                          std::invalid_argument);

        /* restrict the certificate to the attested ball first: accepted */
        const auto loja_ball = hierarchy_restrict(loja, ball_domain({0.0, 0.0}, 1.0), P);
        const auto back = convert_reverse_on_invariant(loja_ball, att_ball);
        REQUIRE(back.domain.kind == DomainDesc::Kind::ball);
        REQUIRE(check_certificate(P, back, 4000).sound);

        /* wrong input kind */
        const auto cond = find_cert(exact_certificates(P),
                                    GeometryCertificate::Kind::conditioned);
        REQUIRE_THROWS_AS(convert_reverse_on_invariant(cond, att_ball),
                          std::invalid_argument);
    }
}

TEST_CASE("ellipticity: exact on supports and cones, sampled elsewhere")
{
    rng r(mix_seed(33, "ell"));
    DenseOperator A;
    A.rows = 6;
    A.cols = 4;
    A.entries.resize(24);
    for (auto& e : A.entries) { e = r.uniform(-1.0, 1.0); }
    const auto P = make_least_squares(A, r.gaussian_vec(6));

    SECTION("support subspace matches the submatrix eigenvalue oracle") {
        SupportSet s;
        s.indices = {0, 2, 3};
        const auto rep = ellipticity_check(P, support_domain(s));
        REQUIRE(rep.exact);
        /* oracle: eigenvalues of the 3x3 section of A*A */
        const vec G = gram_matrix(A);
        vec sub(9);
        for (int i = 0; i < 3; i++) {
            for (int j = 0; j < 3; j++) {
                sub[3*i+j] = G[4*s.indices[i] + s.indices[j]];
            }
        }
        const vec evs = oracle::sym_eigenvalues(sub, 3);
        REQUIRE(std::fabs(rep.gamma - evs[0]) <= 1e-9*std::max(1.0, evs[0]));
    }

    SECTION("sparsity cone matches exhaustive enumeration") {
        const auto rep = ellipticity_check(P, sparse_cone_domain(2));
        REQUIRE(rep.exact);
        REQUIRE(std::fabs(rep.gamma - restricted_min_eig(A, 2)) <= 1e-12);
    }

    SECTION("sampled path approaches the smallest eigenvalue from above") {
        const auto Pd = make_least_squares(DiagonalOperator{{2.0, 1.0, 0.5}},
                                           {1.0, 1.0, 1.0});
        const auto rep = ellipticity_check(Pd, whole_space_domain(), 20000);
        REQUIRE_FALSE(rep.exact);
        REQUIRE(rep.gamma >= 0.25 - 1e-12);
        REQUIRE(rep.gamma <= 0.27);
    }

    SECTION("conditioning from ellipticity is sound on the support subspace") {
        rng r2(mix_seed(34, "lasso-ell"));
        DenseOperator B;
        B.rows = 8;
        B.cols = 5;
        B.entries.resize(40);
        for (auto& e : B.entries) { e = r2.uniform(-1.0, 1.0); }
        const auto Pl = make_lasso(B, r2.gaussian_vec(8), 0.5);
        const SupportSet s = support_of(Pl.argmin.xbar);
        if (!s.indices.empty()) {
            const auto ell = ellipticity_check(Pl, support_domain(s));
            REQUIRE(ell.exact);
            REQUIRE(ell.gamma > 0.0);
            const auto cert = conditioning_from_ellipticity(Pl, support_domain(s), ell);
            REQUIRE(cert.provenance == "ellipticity:exact");
            REQUIRE(check_certificate(Pl, cert, 5000).sound);
            /* the estimator on the same domain lands on the same constant */
            const auto est = estimate_conditioning(Pl, support_domain(s), 2.0, 20000);
            REQUIRE(est.constant >= ell.gamma*(1.0 - 1e-9));
            REQUIRE(est.constant <= ell.gamma*1.05);
        }
    }

    SECTION("zero gamma is rejected") {
        DenseOperator dup;
        dup.rows = 2;
        dup.cols = 2;
        dup.entries = {1.0, 1.0, 1.0, 1.0};
        const auto Pd = make_least_squares(dup, vec{1.0, 1.0});
        const auto rep = ellipticity_check(Pd, sparse_cone_domain(2));
        REQUIRE(rep.gamma <= 1e-12);
        REQUIRE_THROWS_AS(conditioning_from_ellipticity(Pd, sparse_cone_domain(2), rep),
                          std::invalid_argument);
    }
}

TEST_CASE("domain hierarchy restriction")
{
    const auto P = make_quadratic(DiagonalOperator{{1.0, 1.0}}, {0.0, 0.0});
    const auto base = make_certificate(GeometryCertificate::Kind::conditioned, 2.0, 1.0,
                                       whole_space_domain(), "exact:test");

    SECTION("structural rules") {
        const auto b = hierarchy_restrict(base, ball_domain({1.0, 0.0}, 2.0), P);
        REQUIRE(b.provenance == "exact:test+restricted");
        REQUIRE_FALSE(b.estimated);

        const auto ball_big = make_certificate(GeometryCertificate::Kind::conditioned,
                                               2.0, 1.0, ball_domain({0.0, 0.0}, 2.0), "t");
        REQUIRE_NOTHROW(hierarchy_restrict(ball_big, ball_domain({0.5, 0.0}, 1.0), P));
        REQUIRE_THROWS_AS(hierarchy_restrict(ball_big, ball_domain({5.0, 0.0}, 1.0), P),
                          std::invalid_argument);

        const auto sub2 = make_certificate(GeometryCertificate::Kind::conditioned,
                                           2.0, 1.0, sublevel_domain(2.0), "t");
        REQUIRE_NOTHROW(hierarchy_restrict(sub2, sublevel_domain(1.0), P));
        REQUIRE_THROWS_AS(hierarchy_restrict(sub2, sublevel_domain(3.0), P),
                          std::invalid_argument);

        SupportSet s;
        s.indices = {0};
        const auto cone = make_certificate(GeometryCertificate::Kind::conditioned,
                                           2.0, 1.0, sparse_cone_domain(2), "t");
        REQUIRE_NOTHROW(hierarchy_restrict(cone, support_domain(s), P));
    }

    SECTION("sampled inclusion fallback") {
        /* ball(0, 1) sits inside sublevel 0.51 of 0.5||x||^2 but not 0.3 */
        const auto sub = make_certificate(GeometryCertificate::Kind::conditioned, 2.0,
                                          1.0, sublevel_domain(0.51), "t");
        const auto got = hierarchy_restrict(sub, ball_domain({0.0, 0.0}, 1.0), P);
        REQUIRE(got.estimated);
        REQUIRE(got.provenance == "t+restricted_sampled");

        const auto tight = make_certificate(GeometryCertificate::Kind::conditioned, 2.0,
                                            1.0, sublevel_domain(0.3), "t");
        REQUIRE_THROWS_AS(hierarchy_restrict(tight, ball_domain({0.0, 0.0}, 1.0), P),
                          std::invalid_argument);
    }
}

TEST_CASE("smoothness consistency audit")
{
    rng r(mix_seed(35, "smooth"));
    DenseOperator A;
    A.rows = 5;
    A.cols = 3;
    A.entries.resize(15);
    for (auto& e : A.entries) { e = r.uniform(-1.0, 1.0); }
    auto P = make_least_squares(A, r.gaussian_vec(5));

    auto rep = spot_check_smoothness(P);
    REQUIRE(rep.lipschitz_ok);
    REQUIRE(rep.monotone_ok);
    REQUIRE(rep.max_ratio <= P.h.lipschitz*(1.0 + 1e-9));

    P.h.lipschitz /= 10.0;   /* under-declared modulus is caught */
    rep = spot_check_smoothness(P);
    REQUIRE_FALSE(rep.lipschitz_ok);

    const auto Pt = make_counterexample_neg(1.5);
    rep = spot_check_smoothness(Pt);
    REQUIRE(rep.lipschitz_ok);
    REQUIRE(rep.monotone_ok);

    const auto Pn = make_norm_pow(3.0, 2);
    rep = spot_check_smoothness(Pn);   /* h = 0: gradient identically 0 */
    REQUIRE(rep.lipschitz_ok);
    REQUIRE(rep.max_ratio == 0.0);
}

TEST_CASE("smoothness caps the conditioning exponent")
{
    using K = GeometryCertificate::Kind;
    const auto d = ball_domain({0.0}, 1.0);

    /* p = 1 conditioning on a C^{1,1} (alpha = 1) function is impossible */
    const auto p1 = make_certificate(K::conditioned, 1.0, 0.5, d, "claim");
    auto v = validate_smoothness_consistency(p1, 1.0, 4.0);
    REQUIRE_FALSE(v.ok);
    REQUIRE(v.reason.find("below alpha + 1") != std::string::npos);

    /* any p below alpha + 1 goes the same way */
    const auto p12 = make_certificate(K::conditioned, 1.2, 0.5, d, "claim");
    REQUIRE_FALSE(validate_smoothness_consistency(p12, 0.5, 2.0).ok);

    /* borderline p = alpha + 1: gamma must not exceed the Holder constant */
    const auto tight = make_certificate(K::conditioned, 2.0, 4.0, d, "claim");
    REQUIRE(validate_smoothness_consistency(tight, 1.0, 4.0).ok);     /* equality */
    REQUIRE_FALSE(validate_smoothness_consistency(tight, 1.0, 3.9).ok);

    /* w|x|^{3/2}: gradient is 1/2-Holder with constant 3w/2 and the exact
     * conditioning p = 3/2, gamma = 3w/2 sits exactly on the sharp edge */
    const double w = 0.7;
    auto Pn = make_norm_pow(1.5, 1, w);
    for (const auto& c : exact_certificates(Pn)) {
        if (c.kind == K::conditioned) {
            REQUIRE(validate_smoothness_consistency(c, 0.5, 1.5*w).ok);
        }
    }

    /* strictly super-edge exponents are fine whatever the constant */
    const auto p4 = make_certificate(K::conditioned, 4.0, 100.0, d, "claim");
    REQUIRE(validate_smoothness_consistency(p4, 1.0, 1e-3).ok);

    /* shipped exact conditioned certificates of the smooth fixtures pass
     * with their true C^{1,1} data */
    auto Pq = make_least_squares(DiagonalOperator{vec{1.0, 2.0}}, vec{1.0, -1.0});
    for (const auto& c : exact_certificates(Pq)) {
        if (c.kind == K::conditioned) {
            REQUIRE(validate_smoothness_consistency(c, 1.0, Pq.h.lipschitz).ok);
        }
    }

    /* guards */
    const auto loja = make_certificate(K::lojasiewicz, 2.0, 1.0, d, "x");
    REQUIRE_THROWS_AS(validate_smoothness_consistency(loja, 1.0, 1.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(validate_smoothness_consistency(tight, 0.0, 1.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(validate_smoothness_consistency(tight, 1.5, 1.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(validate_smoothness_consistency(tight, 1.0, 0.0),
                      std::invalid_argument);
}

TEST_CASE("estimator guards")
{
    const auto P = make_counterexample_neg(1.0);
    REQUIRE_THROWS_AS(estimate_conditioning(P, whole_space_domain(), 2.0, 100),
                      std::logic_error);
    const auto Pn = make_norm_pow(2.0, 2);
    REQUIRE_THROWS_AS(estimate_conditioning(Pn, whole_space_domain(), 0.5, 100),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(estimate_lojasiewicz(Pn, whole_space_domain(), 0.5, 100),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(make_certificate(GeometryCertificate::Kind::conditioned, 2.0,
                                       -1.0, whole_space_domain(), "x"),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(make_certificate(GeometryCertificate::Kind::lojasiewicz, 0.5,
                                       1.0, whole_space_domain(), "x"),
                      std::invalid_argument);
}

TEST_CASE("certificate and domain serialization")
{
    std::vector<DomainDesc> domains = {
        whole_space_domain(),
        ball_domain({1.0, -2.0}, 3.0),
        sublevel_domain(1.5),
        halfspace_domain({-1.0, 0.5}, -2.0),
        sparse_cone_domain(3),
        source_set_domain(0.75, 2.0),
    };
    SupportSet s;
    s.indices = {1, 4, 5};
    domains.push_back(support_domain(s));
    {
        DomainDesc bs = ball_domain({0.0, 0.0}, 1.0);
        bs.kind = DomainDesc::Kind::ball_and_sublevel;
        bs.level = 0.25;
        domains.push_back(bs);
    }

    for (const auto& d : domains) {
        const auto back = domain_from_json(domain_to_json(d));
        REQUIRE(domain_describe(back) == domain_describe(d));
        const auto cert = make_certificate(GeometryCertificate::Kind::lojasiewicz,
                                           2.0, 0.7, d, "exact:test", true, 123);
        const auto cback = certificate_from_json(certificate_to_json(cert));
        REQUIRE(cback.kind == cert.kind);
        REQUIRE(cback.p == cert.p);
        REQUIRE(cback.constant == cert.constant);
        REQUIRE(cback.provenance == cert.provenance);
        REQUIRE(cback.estimated == cert.estimated);
        REQUIRE(cback.samples == cert.samples);
        REQUIRE(domain_describe(cback.domain) == domain_describe(cert.domain));
    }

    REQUIRE_THROWS_AS(domain_to_json(annulus_domain(0.5, 2.0)), std::invalid_argument);
    nlohmann::json bad;
    bad["kind"] = "moebius";
    REQUIRE_THROWS_AS(domain_from_json(bad), std::invalid_argument);
}
