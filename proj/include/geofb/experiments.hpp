#pragma once

/* Named experiments behind the command-line driver.
 *
 * An ExperimentSpec is the JSON-facing description of one run: problem family
 * and parameters, solver settings, where the geometry certificate comes from
 * (exact / estimated / provided), which artifacts to emit, and the seed.  The
 * built-in names are parameterized families -- norm_pow_p defaults to p = 4
 * but runs any supported exponent via params -- and every name in
 * builtin_names() runs with plain defaults.
 *
 * run_experiment() produces the trace, the rate prediction, the trace
 * certification, the per-iteration inequality audit, the plot series, and a
 * ready-to-serialize report.  It never touches the filesystem; the CLI owns
 * file layout.  For a fixed spec (including seed) the result is
 * deterministic, so repeated runs serialize byte-identically.
 *
 * The regime table at the bottom maps each qualitative convergence regime to
 * its envelope and to the built-in experiment instantiating it.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "invprob.hpp"
#include "plot.hpp"
#include "rates.hpp"

namespace geofb {

/*------------------------------------------------------------------ spec --*/

struct ExperimentSpec {
    std::string name = "custom";
    nlohmann::json problem;          /* explicit problem JSON (custom runs) */
    double lambda = 0.0;             /* 0 = family default */
    long iters = 0;                  /* 0 = family default */
    double tol_step = 0.0;
    double tol_resid = 0.0;
    vec x0;                          /* empty = family default */
    std::string cert_source = "exact";  /* exact | estimated | provided */
    nlohmann::json provided_cert;
    std::vector<std::string> outputs{"csv", "json", "svg"};
    std::uint64_t seed = 1;
    nlohmann::json params = nlohmann::json::object();
};

inline ExperimentSpec spec_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) { throw std::invalid_argument("config: top level must be an object"); }
    for (const auto& kv : j.items()) {
        static const char* allowed[] = {"name", "seed", "problem", "solver",
                                        "certificate", "outputs", "params"};
        bool ok = false;
        for (const char* k : allowed) { ok = ok || kv.key() == k; }
        if (!ok) { throw std::invalid_argument("config: unknown key '" + kv.key() + "'"); }
    }
    ExperimentSpec s;
    if (!j.contains("name") || !j["name"].is_string()) {
        throw std::invalid_argument("config: 'name' (string) is required");
    }
    s.name = j["name"].get<std::string>();
    if (!j.contains("seed") || !j["seed"].is_number()) {
        throw std::invalid_argument("config: 'seed' (integer) is required");
    }
    s.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("problem")) { s.problem = j["problem"]; }
    if (j.contains("solver")) {
        const auto& v = j["solver"];
        if (!v.is_object()) { throw std::invalid_argument("config: 'solver' must be an object"); }
        for (const auto& kv : v.items()) {
            const std::string& k = kv.key();
            if (k == "lambda") { s.lambda = kv.value().get<double>(); }
            else if (k == "iters" || k == "max_iters") { s.iters = kv.value().get<long>(); }
            else if (k == "tol_step") { s.tol_step = kv.value().get<double>(); }
            else if (k == "tol_resid") { s.tol_resid = kv.value().get<double>(); }
            else if (k == "x0") { s.x0 = kv.value().get<vec>(); }
            else { throw std::invalid_argument("config: unknown solver key '" + k + "'"); }
        }
    }
    if (j.contains("certificate")) {
        const auto& c = j["certificate"];
        if (c.is_string()) {
            s.cert_source = c.get<std::string>();
            if (s.cert_source != "exact" && s.cert_source != "estimated") {
                throw std::invalid_argument("config: certificate must be \"exact\", "
                                            "\"estimated\", or a certificate object");
            }
        } else if (c.is_object()) {
            s.cert_source = "provided";
            s.provided_cert = c;
        } else {
            throw std::invalid_argument("config: bad 'certificate' value");
        }
    }
    if (j.contains("outputs")) {
        s.outputs.clear();
        for (const auto& o : j["outputs"]) {
            const std::string v = o.get<std::string>();
            if (v != "csv" && v != "json" && v != "svg" && v != "table") {
                throw std::invalid_argument("config: unknown output '" + v + "'");
            }
            s.outputs.push_back(v);
        }
    }
    if (j.contains("params")) {
        if (!j["params"].is_object()) {
            throw std::invalid_argument("config: 'params' must be an object");
        }
        s.params = j["params"];
    }
    return s;
}

inline nlohmann::json spec_to_json(const ExperimentSpec& s)
{
    nlohmann::json j;
    j["name"] = s.name;
    j["seed"] = s.seed;
    if (!s.problem.is_null()) { j["problem"] = s.problem; }
    nlohmann::json sv = nlohmann::json::object();
    if (s.lambda > 0.0) { sv["lambda"] = s.lambda; }
    if (s.iters > 0) { sv["iters"] = s.iters; }
    if (s.tol_step > 0.0) { sv["tol_step"] = s.tol_step; }
    if (s.tol_resid > 0.0) { sv["tol_resid"] = s.tol_resid; }
    if (!s.x0.empty()) { sv["x0"] = s.x0; }
    if (!sv.empty()) { j["solver"] = sv; }
    if (s.cert_source == "provided") { j["certificate"] = s.provided_cert; }
    else { j["certificate"] = s.cert_source; }
    j["outputs"] = s.outputs;
    if (!s.params.empty()) { j["params"] = s.params; }
    return j;
}

/* `--set key=value` override: solver keys go to solver fields, everything
 * else lands in params (numeric when it parses as a number). */
inline void apply_override(ExperimentSpec& s, const std::string& key, const std::string& value)
{
    auto as_num = [&](const std::string& v) {
        char* end = nullptr;
        const double d = std::strtod(v.c_str(), &end);
        if (end == v.c_str() || *end != '\0') {
            throw std::invalid_argument("--set " + key + ": '" + v + "' is not a number");
        }
        return d;
    };
    if (key.empty()) { throw std::invalid_argument("--set: empty key"); }
    if (key == "lambda") { s.lambda = as_num(value); }
    else if (key == "iters" || key == "max_iters") { s.iters = static_cast<long>(as_num(value)); }
    else if (key == "tol_step") { s.tol_step = as_num(value); }
    else if (key == "tol_resid") { s.tol_resid = as_num(value); }
    else if (key == "seed") { s.seed = static_cast<std::uint64_t>(as_num(value)); }
    else if (key == "certificate") {
        if (value != "exact" && value != "estimated") {
            throw std::invalid_argument("--set certificate: must be exact or estimated");
        }
        s.cert_source = value;
    } else {
        char* end = nullptr;
        const double d = std::strtod(value.c_str(), &end);
        if (end != value.c_str() && *end == '\0') { s.params[key] = d; }
        else { s.params[key] = value; }
    }
}

/*---------------------------------------------------------------- result --*/

struct ExperimentResult {
    std::string name;
    bool pass = false;
    long first_violation = -1;
    bool has_trace = false;
    Trace trace;
    nlohmann::json report;
    std::string table_text;          /* regime-table artifact, usually empty */
    std::vector<PlotSeries> plot;    /* empty when there is nothing to draw */
};

namespace expdetail {

inline bool has_param(const ExperimentSpec& s, const char* k) { return s.params.contains(k); }

inline double param_num(const ExperimentSpec& s, const char* k, double dflt)
{
    if (!s.params.contains(k)) { return dflt; }
    const auto& v = s.params[k];
    if (v.is_number()) { return v.get<double>(); }
    if (v.is_string()) {
        const std::string str = v.get<std::string>();
        char* end = nullptr;
        const double d = std::strtod(str.c_str(), &end);
        if (end != str.c_str() && *end == '\0') { return d; }
    }
    throw std::invalid_argument(std::string("param '") + k + "' must be a number");
}

inline std::string param_str(const ExperimentSpec& s, const char* k, const std::string& dflt)
{
    if (!s.params.contains(k)) { return dflt; }
    const auto& v = s.params[k];
    if (!v.is_string()) { throw std::invalid_argument(std::string("param '") + k + "' must be a string"); }
    return v.get<std::string>();
}

inline double lam_or(const ExperimentSpec& s, double dflt)
{
    return s.lambda > 0.0 ? s.lambda : dflt;
}

inline long iters_or(const ExperimentSpec& s, long dflt)
{
    return s.iters > 0 ? s.iters : dflt;
}

inline SolveConfig base_config(const ExperimentSpec& s, double lam_dflt, long iters_dflt,
                               const vec& x0_dflt)
{
    SolveConfig cfg;
    cfg.lambda = lam_or(s, lam_dflt);
    cfg.max_iters = iters_or(s, iters_dflt);
    cfg.tol_step = s.tol_step;
    cfg.tol_resid = s.tol_resid;
    cfg.x0 = s.x0.empty() ? x0_dflt : s.x0;
    if (cfg.x0.size() != x0_dflt.size()) {
        throw std::invalid_argument("config: x0 has wrong dimension");
    }
    return cfg;
}

inline nlohmann::json audit_to_json(const FbAudit& a)
{
    nlohmann::json j;
    j["descent_ok"] = a.descent.descent_ok;
    j["gradient_ok"] = a.descent.gradient_ok;
    j["chain_ok"] = a.chain_ok;
    j["gap_monotone_ok"] = a.gap_monotone_ok;
    j["resid_monotone_ok"] = a.resid_monotone_ok;
    j["fejer_checked"] = a.fejer_checked;
    j["fejer_ok"] = a.fejer_ok;
    j["worstcase_checked"] = a.worstcase_checked;
    j["worstcase_ok"] = a.worstcase_ok;
    j["pass"] = a.pass();
    nlohmann::json fv;
    fv["descent"] = a.descent.first_descent_violation;
    fv["gradient"] = a.descent.first_gradient_violation;
    fv["chain"] = a.first_chain_violation;
    fv["gap_monotone"] = a.first_gap_violation;
    fv["resid_monotone"] = a.first_resid_violation;
    fv["fejer"] = a.first_fejer_violation;
    fv["worstcase"] = a.first_worstcase_violation;
    j["first_violations"] = fv;
    return j;
}

inline long audit_first(const FbAudit& a)
{
    long v = -1;
    auto upd = [&](long x) { if (x >= 0 && (v < 0 || x < v)) { v = x; } };
    upd(a.descent.first_descent_violation);
    upd(a.descent.first_gradient_violation);
    upd(a.first_chain_violation);
    upd(a.first_gap_violation);
    upd(a.first_resid_violation);
    upd(a.first_fejer_violation);
    upd(a.first_worstcase_violation);
    return v;
}

/* exact certificate for P, reduced to lojasiewicz form */
inline bool pick_exact_loja(const CompositeProblem& P, GeometryCertificate& out)
{
    auto certs = exact_certificates(P);
    for (const auto& c : certs) {
        if (c.kind == GeometryCertificate::Kind::lojasiewicz) { out = c; return true; }
    }
    for (const auto& c : certs) {
        if (c.kind == GeometryCertificate::Kind::conditioned) {
            out = convert_forward(convert_forward(c));
            return true;
        }
    }
    return false;
}

struct ResolvedCert {
    bool have = false;
    GeometryCertificate cert;
    std::string source;
};

inline ResolvedCert resolve_certificate(const ExperimentSpec& spec,
                                        const CompositeProblem& P, const vec& x0)
{
    ResolvedCert rc;
    if (spec.cert_source == "provided") {
        GeometryCertificate c = certificate_from_json(spec.provided_cert);
        int hops = 0;
        while (c.kind != GeometryCertificate::Kind::lojasiewicz && hops++ < 2) {
            c = convert_forward(c);
        }
        rc.have = true;
        rc.cert = c;
        rc.source = "provided";
        return rc;
    }
    if (spec.cert_source == "estimated") {
        GeometryCertificate exact;
        const bool has_exact = pick_exact_loja(P, exact);
        double p = 0.0;
        if (has_param(spec, "cert_p")) { p = param_num(spec, "cert_p", 0.0); }
        else if (has_exact) { p = exact.p; }
        else {
            throw std::invalid_argument("estimated certificate needs params.cert_p "
                                        "when no exact exponent is known");
        }
        const vec center = P.argmin.available() ? P.argmin.xbar : x0;
        const double radius = std::max(1.0, 2.0*nrm2(vsub(x0, center)));
        const long n_samples = static_cast<long>(param_num(spec, "cert_samples", 10000.0));
        rc.cert = estimate_lojasiewicz(P, ball_domain(center, radius), p, n_samples,
                                       mix_seed(spec.seed, "cert"));
        rc.have = true;
        rc.source = "estimated";
        return rc;
    }
    if (spec.cert_source != "exact") {
        throw std::invalid_argument("certificate source must be exact, estimated, or provided");
    }
    rc.have = pick_exact_loja(P, rc.cert);
    rc.source = "exact";
    return rc;
}

inline nlohmann::json base_report(const ExperimentSpec& spec, const CompositeProblem& P,
                                  const SolveConfig& cfg)
{
    nlohmann::json j;
    j["name"] = spec.name;
    j["seed"] = spec.seed;
    j["family"] = P.family;
    j["solver"] = {{"lambda", cfg.lambda}, {"max_iters", cfg.max_iters}};
    if (P.dim <= 64) { j["problem"] = problem_to_json(P); }
    else { j["problem"] = {{"family", P.family}, {"dim", P.dim}}; }
    return j;
}

inline void attach_trace_summary(nlohmann::json& j, const Trace& t)
{
    const TraceRow& last = t.rows.back();
    nlohmann::json s;
    s["iterations"] = t.iters();
    s["final_gap"] = last.gap;
    s["final_resid"] = last.resid;
    if (std::isfinite(last.dist)) { s["final_dist"] = last.dist; }
    s["stop_reason"] = t.stop_reason;
    s["lipschitz"] = t.lipschitz;
    j["trace"] = s;
}

/* gap (and dist, when present) as solid series, the predicted envelope
 * dashed; `offset` shifts envelope indices for tail predictions */
inline std::vector<PlotSeries> trace_plot(const Trace& t, const RatePrediction* pred,
                                          long offset = 0)
{
    std::vector<PlotSeries> out;
    PlotSeries gap{"gap", {}, false};
    for (const auto& r : t.rows) { gap.points.emplace_back(static_cast<double>(r.n), r.gap); }
    out.push_back(std::move(gap));
    if (!t.rows.empty() && std::isfinite(t.rows[0].dist)) {
        PlotSeries d{"dist", {}, false};
        for (const auto& r : t.rows) { d.points.emplace_back(static_cast<double>(r.n), r.dist); }
        out.push_back(std::move(d));
    }
    if (pred != nullptr) {
        PlotSeries env{"predicted envelope", {}, true};
        for (const auto& r : t.rows) {
            if (r.n - offset < 1) { continue; }
            env.points.emplace_back(static_cast<double>(r.n),
                                    pred->envelope(r.n - offset));
        }
        out.push_back(std::move(env));
    }
    return out;
}

/* renumber a trace so row n0 becomes iteration 0 (tail certification) */
inline Trace tail_from(const Trace& t, long n0)
{
    if (n0 < 0 || n0 >= static_cast<long>(t.rows.size())) {
        throw std::invalid_argument("tail_from: index out of range");
    }
    Trace out;
    out.lambda = t.lambda;
    out.lipschitz = t.lipschitz;
    out.inf_value = t.inf_value;
    out.problem_hash = t.problem_hash;
    out.family = t.family + ":tail";
    out.stop_reason = t.stop_reason;
    out.x_final = t.x_final;
    for (std::size_t i = static_cast<std::size_t>(n0); i < t.rows.size(); i++) {
        TraceRow r = t.rows[i];
        r.n -= n0;
        out.rows.push_back(r);
    }
    if (!t.supports.empty()) {
        out.supports.assign(t.supports.begin() + n0, t.supports.end());
    }
    return out;
}

inline void finish(ExperimentResult& res, const FbAudit& audit, const CertReport* rep,
                   bool extra_ok = true)
{
    const bool cert_ok = rep == nullptr || rep->pass;
    res.pass = audit.pass() && cert_ok && extra_ok;
    if (rep != nullptr && rep->first_violation >= 0) { res.first_violation = rep->first_violation; }
    else { res.first_violation = audit_first(audit); }
    res.report["pass"] = res.pass;
    res.report["first_violation"] = res.first_violation;
}

}  // namespace expdetail

/*-------------------------------------------------------------- builtins --*/

/* w * |x|^p on R^dim; supported exponents p >= 1 (grid 1, 1.5, 2, 4, 6) */
inline ExperimentResult run_norm_pow_p(const ExperimentSpec& spec)
{
    using namespace expdetail;
    const double p = param_num(spec, "p", 4.0);
    const int dim = static_cast<int>(param_num(spec, "dim", 1.0));
    const double w = param_num(spec, "weight", 1.0);
    auto P = make_norm_pow(p, dim, w);

    const long iters_dflt = p == 1.0 ? 12 : (p < 2.0 ? 40 : (p == 2.0 ? 60 : 20000));
    const SolveConfig cfg = base_config(spec, 0.5, iters_dflt,
                                        vec(static_cast<std::size_t>(dim), 1.3));
    auto t = run_fb(P, cfg);
    const auto audit = fb_inequality_audit(t);
    const auto rc = resolve_certificate(spec, P, cfg.x0);

    ExperimentResult res;
    res.name = spec.name;
    res.has_trace = true;
    res.report = base_report(spec, P, cfg);
    res.report["params"] = {{"p", p}, {"dim", dim}, {"weight", w}};
    res.report["certificate"] = certificate_to_json(rc.cert);
    res.report["certificate_source"] = rc.source;
    attach_trace_summary(res.report, t);
    res.report["audit"] = audit_to_json(audit);

    if (!(t.rows[0].gap > 0.0)) {
        throw std::invalid_argument("norm_pow_p: start point has zero gap");
    }
    const RatePrediction pred =
        predict_from_certificate(cfg.lambda, t.lipschitz, rc.cert, t.rows[0].gap);
    const CertReport rep = certify_trace(t, pred);
    res.report["prediction"] = prediction_to_json(pred);
    res.report["certification"] = cert_report_to_json(rep);
    res.report["measured_slope"] = rep.measured_slope;

    bool extra_ok = true;
    if (p > 1.0 && p < 2.0) {
        /* independent two-sided error-bound check with the split constants */
        double gsub = 0.0, gcond = 0.0;
        for (const auto& c : exact_certificates(P)) {
            if (c.kind == GeometryCertificate::Kind::subregular) { gsub = c.constant; }
            if (c.kind == GeometryCertificate::Kind::conditioned) { gcond = c.constant; }
        }
        if (gsub > 0.0 && gcond > 0.0) {
            const auto sl = superlinear_bounds_check(t, p, gsub, gcond, cfg.lambda);
            res.report["superlinear"] = {{"order_estimate", sl.order_estimate},
                                         {"bound_dist_ok", sl.bound_dist_ok},
                                         {"bound_gap_ok", sl.bound_gap_ok},
                                         {"pairs_checked", sl.pairs_checked}};
            extra_ok = sl.bound_dist_ok && sl.bound_gap_ok;
        }
    }
    finish(res, audit, &rep, extra_ok);
    res.trace = std::move(t);
    res.plot = trace_plot(res.trace, &pred);
    return res;
}

/* 2-d quadratic with spectrum {1, 4}: Q-linear gap, kappa = 1/4 at lambda = 1/L */
inline ExperimentResult run_strongly_convex_quadratic(const ExperimentSpec& spec)
{
    using namespace expdetail;
    const LinearOperator Q = DiagonalOperator{vec{1.0, 4.0}};
    auto P = make_quadratic(Q, vec{1.0, 2.0});

    const SolveConfig cfg = base_config(spec, 0.25, 200, vec{3.0, -2.0});
    auto t = run_fb(P, cfg);
    const auto audit = fb_inequality_audit(t);
    const auto rc = resolve_certificate(spec, P, cfg.x0);

    ExperimentResult res;
    res.name = spec.name;
    res.has_trace = true;
    res.report = base_report(spec, P, cfg);
    res.report["certificate"] = certificate_to_json(rc.cert);
    res.report["certificate_source"] = rc.source;
    attach_trace_summary(res.report, t);
    res.report["audit"] = audit_to_json(audit);

    const RatePrediction pred =
        predict_from_certificate(cfg.lambda, t.lipschitz, rc.cert, t.rows[0].gap);
    const CertReport rep = certify_trace(t, pred);
    res.report["prediction"] = prediction_to_json(pred);
    res.report["certification"] = cert_report_to_json(rep);
    res.report["kappa"] = pred.kappa;
    res.report["gap_q_bound"] = 1.0/(1.0 + pred.kappa);
    res.report["measured_qfactor"] = rep.measured_qfactor;

    finish(res, audit, &rep);
    res.trace = std::move(t);
    res.plot = trace_plot(res.trace, &pred);
    return res;
}

/* small dense lasso: identification, then a Q-linear tail from the
 * restricted curvature on the identified support */
inline ExperimentResult run_lasso_small(const ExperimentSpec& spec)
{
    using namespace expdetail;
    const int m = 8, n = 12;
    const double alpha = param_num(spec, "alpha", 0.1);
    rng r(mix_seed(spec.seed, "lasso"));
    DenseOperator A;
    A.rows = m;
    A.cols = n;
    A.entries.resize(static_cast<std::size_t>(m)*n);
    for (auto& e : A.entries) { e = r.gaussian()/std::sqrt(static_cast<double>(m)); }
    vec xtrue(n, 0.0);
    xtrue[1] = 1.0;
    xtrue[5] = -1.5;
    xtrue[9] = 0.8;
    const LinearOperator Aop = A;
    const vec y = op_apply(Aop, xtrue);
    auto P = make_lasso(Aop, y, alpha);

    const SolveConfig cfg = base_config(spec, 1.0/P.h.lipschitz, 3000, vec(n, 0.0));
    auto t = run_fb(P, cfg);
    const auto audit = fb_inequality_audit(t);
    const auto sup = detect_support_identification(t);

    ExperimentResult res;
    res.name = spec.name;
    res.has_trace = true;
    res.report = base_report(spec, P, cfg);
    res.report["params"] = {{"alpha", alpha}, {"rows", m}, {"cols", n}};
    attach_trace_summary(res.report, t);
    res.report["audit"] = audit_to_json(audit);
    res.report["identified"] = sup.identified;
    res.report["identification_n"] = sup.iter;
    res.report["support"] = sup.support.indices;

    if (!sup.identified) {
        res.report["note"] = "support never froze; no tail certificate";
        finish(res, audit, nullptr, false);
        res.trace = std::move(t);
        res.plot = trace_plot(res.trace, nullptr);
        return res;
    }

    const double gamma_I = sup.support.indices.empty()
                               ? t.lipschitz
                               : support_min_eig(Aop, sup.support);
    res.report["gamma_I"] = gamma_I;
    auto tail = tail_from(t, sup.iter);
    const bool tail_ok = !tail.rows.empty() && tail.rows[0].gap > 0.0 && gamma_I > 0.0;
    if (!tail_ok) {
        res.report["note"] = "tail already at the minimum; nothing to certify";
        finish(res, audit, nullptr);
        res.trace = std::move(t);
        res.plot = trace_plot(res.trace, nullptr);
        return res;
    }

    const auto cond = make_certificate(GeometryCertificate::Kind::conditioned, 2.0,
                                       gamma_I, support_domain(sup.support), "exact");
    const auto loja = convert_forward(convert_forward(cond));
    const RatePrediction pred =
        predict_from_certificate(cfg.lambda, t.lipschitz, loja, tail.rows[0].gap);
    const CertReport rep = certify_trace(tail, pred);
    res.report["certificate"] = certificate_to_json(loja);
    res.report["certificate_source"] = "exact";
    res.report["prediction"] = prediction_to_json(pred);
    res.report["certification"] = cert_report_to_json(rep);
    res.report["kappa_tail"] = pred.kappa;
    res.report["measured_qfactor"] = rep.measured_qfactor;

    finish(res, audit, &rep);
    res.trace = std::move(t);
    res.plot = trace_plot(res.trace, &pred, sup.iter);
    return res;
}

/* diagonal inverse problem with a source condition of order mu */
inline ExperimentResult run_landweber_source(const ExperimentSpec& spec)
{
    using namespace expdetail;
    const double mu = param_num(spec, "mu", 0.5);
    const double delta = param_num(spec, "delta", 1.0);
    const std::string fam_name = param_str(spec, "family", "poly");
    SigmaFamily fam;
    if (fam_name == "poly") {
        fam.kind = SigmaFamily::Kind::poly;
        fam.param = param_num(spec, "q", 1.0);
    } else if (fam_name == "geo") {
        fam.kind = SigmaFamily::Kind::geo;
        fam.param = param_num(spec, "ratio", 0.5);
    } else {
        throw std::invalid_argument("landweber_source: family must be poly or geo");
    }
    const int N = static_cast<int>(param_num(spec, "N", 2000.0));
    const double lam = lam_or(spec, 1.0);
    const long iters = iters_or(spec, 10000);

    auto ex = landweber_rate_experiment(fam, N, SourceSpec{mu, delta}, lam, iters, spec.seed);
    const auto audit = fb_inequality_audit(ex.trace);

    ExperimentResult res;
    res.name = spec.name;
    res.has_trace = true;
    {
        nlohmann::json j;
        j["name"] = spec.name;
        j["seed"] = spec.seed;
        j["family"] = ex.trace.family;
        j["solver"] = {{"lambda", lam}, {"max_iters", iters}};
        j["problem"] = {{"family", "least_squares"}, {"dim", N},
                        {"sigma_family", fam_name}, {"sigma_param", fam.param}};
        res.report = std::move(j);
    }
    res.report["params"] = {{"mu", mu}, {"delta", delta}, {"N", N},
                            {"family", fam_name}, {"w_norm", ex.w_norm}};
    if (spec.cert_source != "exact") {
        res.report["note"] = "source-set runs always use the exact source certificate";
    }
    if (ex.has_cert) {
        res.report["certificate"] = certificate_to_json(ex.cert);
        res.report["certificate_source"] = "exact";
        res.report["loja_sound"] = ex.loja_sound;
        res.report["expected_gap_slope"] = -(1.0 + 2.0*mu);
        if (mu > 0.0) { res.report["expected_dist_slope"] = -mu; }
    } else {
        res.report["certificate_source"] = "none (mu = 0: certificate-free baseline)";
        res.report["expected_gap_slope"] = -1.0;
    }
    attach_trace_summary(res.report, ex.trace);
    res.report["audit"] = audit_to_json(audit);
    res.report["prediction"] = prediction_to_json(ex.pred);
    res.report["certification"] = cert_report_to_json(ex.report);
    res.report["gap_slope"] = ex.gap_slope;
    res.report["measured_slope"] = ex.gap_slope;
    res.report["dist_slope"] = ex.dist_slope;
    res.report["truncation_limited"] = ex.truncation_limited;
    res.report["n_cut"] = ex.n_cut;

    const bool extra_ok = !ex.has_cert || ex.loja_sound;
    finish(res, audit, &ex.report, extra_ok);
    res.trace = std::move(ex.trace);
    res.plot = trace_plot(res.trace, &ex.pred);
    return res;
}

/* smooth 1-d tail family with empty argmin: negative exponent regime */
inline ExperimentResult run_counterexample_neg_alpha(const ExperimentSpec& spec)
{
    using namespace expdetail;
    const double alpha = param_num(spec, "alpha", 1.0);
    auto P = make_counterexample_neg(alpha);
    const double L = P.h.lipschitz;

    const SolveConfig cfg = base_config(spec, 1.0/L, 20000, vec{1.0});
    auto t = run_fb(P, cfg);
    const auto audit = fb_inequality_audit(t);
    const auto rc = resolve_certificate(spec, P, cfg.x0);

    ExperimentResult res;
    res.name = spec.name;
    res.has_trace = true;
    res.report = base_report(spec, P, cfg);
    res.report["params"] = {{"alpha", alpha}};
    res.report["certificate"] = certificate_to_json(rc.cert);
    res.report["certificate_source"] = rc.source;
    attach_trace_summary(res.report, t);
    res.report["audit"] = audit_to_json(audit);

    const RatePrediction pred =
        predict_from_certificate(cfg.lambda, t.lipschitz, rc.cert, t.rows[0].gap);
    const CertReport rep = certify_trace(t, pred);
    res.report["prediction"] = prediction_to_json(pred);
    res.report["certification"] = cert_report_to_json(rep);
    res.report["expected_slope"] = -alpha/(2.0 + alpha);
    res.report["measured_slope"] = rep.measured_slope;

    finish(res, audit, &rep);
    res.trace = std::move(t);
    res.plot = trace_plot(res.trace, &pred);
    return res;
}

/* gaussian sparse recovery with the restricted-injectivity certificate */
inline ExperimentResult run_sparse_recovery(const ExperimentSpec& spec)
{
    using namespace expdetail;
    const int m = static_cast<int>(param_num(spec, "rows", 10.0));
    const int n = static_cast<int>(param_num(spec, "cols", 16.0));
    if (m < 1 || n < 8) {
        throw std::invalid_argument("sparse_recovery: need rows >= 1 and cols >= 8");
    }
    const double alpha = param_num(spec, "alpha", 0.05);
    const double noise = param_num(spec, "noise", 0.0);

    rng r(spec.seed);
    DenseOperator A;
    A.rows = m;
    A.cols = n;
    A.entries.resize(static_cast<std::size_t>(m)*n);
    for (auto& e : A.entries) { e = r.gaussian()/std::sqrt(static_cast<double>(m)); }
    vec xtrue(n, 0.0);
    if (n == 16) {
        xtrue[2] = 1.5;
        xtrue[7] = -2.0;
        xtrue[11] = 1.0;
    } else {
        xtrue[n/6] = 1.5;
        xtrue[n/2] = -2.0;
        xtrue[(5*n)/6] = 1.0;
    }
    const double L = gram_norm(LinearOperator{A});
    const double lam = lam_or(spec, 1.0/L);
    const long iters = iters_or(spec, 20000);

    const auto sr = sparse_recovery_experiment(A, xtrue, alpha, lam, iters, noise,
                                               mix_seed(spec.seed, "noise"));

    ExperimentResult res;
    res.name = spec.name;
    res.report["name"] = spec.name;
    res.report["seed"] = spec.seed;
    res.report["family"] = "lasso";
    res.report["solver"] = {{"lambda", lam}, {"max_iters", iters}};
    res.report["params"] = {{"rows", m}, {"cols", n}, {"alpha", alpha}, {"noise", noise}};
    res.report["ok"] = sr.ok;
    if (!sr.failure.empty()) { res.report["failure"] = sr.failure; }
    res.report["gamma_s"] = sr.gamma_s;
    if (!sr.ok && sr.trace.rows.empty()) {
        res.pass = false;
        res.first_violation = -1;
        res.report["pass"] = false;
        res.report["first_violation"] = -1;
        return res;
    }

    const auto audit = fb_inequality_audit(sr.trace);
    res.has_trace = true;
    attach_trace_summary(res.report, sr.trace);
    res.report["audit"] = audit_to_json(audit);
    res.report["identification_n"] = sr.n0;
    res.report["support"] = sr.support.indices;
    res.report["support_matches_truth"] = sr.support_matches;
    res.report["gamma_I"] = sr.gamma_I;
    res.report["eps_I"] = sr.eps_I;
    res.report["kappa"] = sr.kappa_val;
    res.report["gap_q_bound"] = sr.gap_q_bound;
    res.report["measured_gap_q"] = sr.measured_gap_q;
    res.report["measured_dist_q"] = sr.measured_dist_q;

    bool have_pred = false;
    RatePrediction pred;
    const long tail0 = std::max(sr.n0, 1L);
    if (sr.kappa_val > 0.0 && static_cast<std::size_t>(tail0) < sr.trace.rows.size()
        && sr.trace.rows[static_cast<std::size_t>(tail0)].gap > 0.0) {
        pred = predict(2.0, sr.kappa_val, sr.trace.rows[static_cast<std::size_t>(tail0)].gap);
        res.report["prediction"] = prediction_to_json(pred);
        have_pred = true;
    }

    finish(res, audit, nullptr, sr.ok);
    res.trace = sr.trace;
    res.plot = trace_plot(res.trace, have_pred ? &pred : nullptr, tail0);
    return res;
}

/*---------------------------------------------------------- regime table --*/

struct RegimeRow {
    std::string condition;
    std::string gap_rate;
    std::string iterate_rate;
    std::string experiment;
};

/* Qualitative regimes, their envelopes, and the built-in that shows each.
 * p is the error-bound exponent; kappa the conditioning ratio it induces. */
inline std::vector<RegimeRow> regime_table()
{
    return {
        {"inf f > -inf", "gap_n = o(1)", "-",
         "counterexample_neg_alpha (alpha=0.5)"},
        {"p in ]-inf,0[", "gap_n = O(n^{p/(2-p)})", "-",
         "counterexample_neg_alpha (alpha=1)"},
        {"argmin f nonempty", "gap_n = o(n^{-1})", "decreasing; o(1) in finite dim",
         "landweber_source (mu=0)"},
        {"p in ]2,+inf[", "gap_n = O(n^{-p/(p-2)})", "dist_n = O(n^{-1/(p-2)})",
         "norm_pow_p (p=4)"},
        {"p = 2", "Q-linear with eps = 1/(1+kappa)", "R-linear, factor 1/sqrt(1+kappa)",
         "strongly_convex_quadratic"},
        {"p = 2 on identified support", "Q-linear tail after identification",
         "R-linear tail", "lasso_small"},
        {"p in ]1,2[", "Q-superlinear of order 1/(p-1)", "R-superlinear of order 1/(p-1)",
         "norm_pow_p (p=1.5)"},
        {"p = 1", "finite termination", "finite termination", "norm_pow_p (p=1)"},
    };
}

inline std::string render_regime_table()
{
    const auto rows = regime_table();
    const std::array<std::string, 4> head{"condition", "gap rate", "iterate rate",
                                          "experiment"};
    std::array<std::size_t, 4> w{};
    for (std::size_t c = 0; c < 4; c++) { w[c] = head[c].size(); }
    auto cell = [](const RegimeRow& r, std::size_t c) -> const std::string& {
        switch (c) {
            case 0: return r.condition;
            case 1: return r.gap_rate;
            case 2: return r.iterate_rate;
            default: return r.experiment;
        }
    };
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < 4; c++) { w[c] = std::max(w[c], cell(r, c).size()); }
    }
    auto pad = [](const std::string& s, std::size_t width) {
        return s + std::string(width - s.size(), ' ');
    };
    std::string out;
    for (std::size_t c = 0; c < 4; c++) {
        out += (c == 0 ? "| " : " | ") + pad(head[c], w[c]);
    }
    out += " |\n";
    for (std::size_t c = 0; c < 4; c++) {
        out += (c == 0 ? "|-" : "-|-") + std::string(w[c], '-');
    }
    out += "-|\n";
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < 4; c++) {
            out += (c == 0 ? "| " : " | ") + pad(cell(r, c), w[c]);
        }
        out += " |\n";
    }
    return out;
}

inline ExperimentResult run_figure1_table(const ExperimentSpec& spec)
{
    ExperimentResult res;
    res.name = spec.name;
    res.table_text = render_regime_table();
    res.report["name"] = spec.name;
    res.report["seed"] = spec.seed;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : regime_table()) {
        rows.push_back({{"condition", r.condition},
                        {"gap_rate", r.gap_rate},
                        {"iterate_rate", r.iterate_rate},
                        {"experiment", r.experiment}});
    }
    res.report["rows"] = rows;
    res.pass = true;
    res.report["pass"] = true;
    res.report["first_violation"] = -1;
    return res;
}

/*---------------------------------------------------------- custom + dispatch --*/

/* explicit problem JSON: solve, audit, and certify with whatever geometry
 * is available (exact / estimated / provided; worst-case baseline otherwise) */
inline ExperimentResult run_custom(const ExperimentSpec& spec)
{
    using namespace expdetail;
    if (spec.problem.is_null()) {
        throw std::invalid_argument("unknown experiment '" + spec.name +
                                    "' and no problem object given");
    }
    auto P = problem_from_json(spec.problem);
    SolveConfig cfg;
    cfg.lambda = spec.lambda > 0.0 ? spec.lambda
                                   : (P.h.lipschitz > 0.0 ? 1.0/P.h.lipschitz : 1.0);
    cfg.max_iters = spec.iters > 0 ? spec.iters : 1000;
    cfg.tol_step = spec.tol_step;
    cfg.tol_resid = spec.tol_resid;
    cfg.x0 = spec.x0.empty() ? vec(static_cast<std::size_t>(P.dim), 1.0) : spec.x0;
    if (static_cast<int>(cfg.x0.size()) != P.dim) {
        throw std::invalid_argument("config: x0 has wrong dimension");
    }

    auto t = run_fb(P, cfg);
    const auto audit = fb_inequality_audit(t);
    const auto rc = resolve_certificate(spec, P, cfg.x0);

    ExperimentResult res;
    res.name = spec.name;
    res.has_trace = true;
    res.report = base_report(spec, P, cfg);
    if (!spec.params.empty()) { res.report["params"] = spec.params; }
    attach_trace_summary(res.report, t);
    res.report["audit"] = audit_to_json(audit);

    bool have_pred = false;
    RatePrediction pred;
    if (rc.have && t.rows[0].gap > 0.0) {
        pred = predict_from_certificate(cfg.lambda, t.lipschitz, rc.cert, t.rows[0].gap);
        res.report["certificate"] = certificate_to_json(rc.cert);
        res.report["certificate_source"] = rc.source;
        have_pred = true;
    } else if (std::isfinite(t.rows[0].dist) && t.rows[0].dist > 0.0) {
        pred = predict_worstcase(cfg.lambda, t.lipschitz, t.rows[0].dist);
        res.report["certificate_source"] = "none (worst-case baseline)";
        have_pred = true;
    } else {
        res.report["certificate_source"] = "none";
        res.report["note"] = "no certificate and no distance column; audit only";
    }

    if (have_pred) {
        const CertReport rep = certify_trace(t, pred);
        res.report["prediction"] = prediction_to_json(pred);
        res.report["certification"] = cert_report_to_json(rep);
        res.report["measured_slope"] = rep.measured_slope;
        finish(res, audit, &rep);
    } else {
        finish(res, audit, nullptr);
    }
    res.trace = std::move(t);
    res.plot = trace_plot(res.trace, have_pred ? &pred : nullptr);
    return res;
}

/* name -> description, in listing order; every entry runs with defaults */
inline const std::vector<std::pair<std::string, std::string>>& builtin_catalog()
{
    static const std::vector<std::pair<std::string, std::string>> catalog = {
        {"norm_pow_p",
         "prox of w*|x|^p; exponent grid p in {1, 1.5, 2, 4, 6} via --set p=..."},
        {"strongly_convex_quadratic",
         "2-d quadratic with spectrum {1,4}; Q-linear gap, kappa = 1/4"},
        {"lasso_small",
         "small dense lasso; Q-linear tail after support identification"},
        {"landweber_source",
         "diagonal inverse problem, source condition mu grid via --set mu=... "
         "(default 0.5; mu=0 runs the certificate-free baseline)"},
        {"counterexample_neg_alpha",
         "smooth 1-d family with empty argmin; alpha grid via --set alpha=... "
         "(default 1)"},
        {"sparse_recovery",
         "gaussian sparse recovery with restricted-injectivity certificate"},
        {"figure1_table",
         "regime table mapping conditions to envelopes and experiments"},
    };
    return catalog;
}

inline std::vector<std::string> builtin_names()
{
    std::vector<std::string> names;
    for (const auto& kv : builtin_catalog()) { names.push_back(kv.first); }
    return names;
}

/* default spec for a built-in; throws on unknown names */
inline ExperimentSpec builtin_spec(const std::string& name)
{
    bool known = false;
    for (const auto& kv : builtin_catalog()) { known = known || kv.first == name; }
    if (!known) { throw std::invalid_argument("unknown experiment '" + name + "'"); }
    ExperimentSpec s;
    s.name = name;
    if (name == "sparse_recovery") { s.seed = 2024; }
    else if (name == "lasso_small") { s.seed = 11; }
    else if (name == "landweber_source") { s.seed = 42; }
    else { s.seed = 1; }
    return s;
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec)
{
    const std::string& n = spec.name;
    if (n == "norm_pow_p") { return run_norm_pow_p(spec); }
    if (n == "strongly_convex_quadratic") { return run_strongly_convex_quadratic(spec); }
    if (n == "lasso_small") { return run_lasso_small(spec); }
    if (n == "landweber_source") { return run_landweber_source(spec); }
    if (n == "counterexample_neg_alpha") { return run_counterexample_neg_alpha(spec); }
    if (n == "sparse_recovery") { return run_sparse_recovery(spec); }
    if (n == "figure1_table") { return run_figure1_table(spec); }
    return run_custom(spec);
}

}  // namespace geofb
