/*=============================================================================
 * Forward-backward splitting
 *
 *     x_{n+1} = prox_{lambda g}(x_n - lambda grad h(x_n)),   0 < lambda < 2/L,
 *
 * with full per-iterate instrumentation.  Each trace row records
 *
 *     gap_n   = f(x_n) - inf f
 *     step_n  = ||x_n - x_{n-1}||
 *     resid_n = dist(0, df(x_n))          (exact, through the sum rule)
 *     dist_n  = dist(x_n, argmin f)       (NaN when no argmin oracle)
 *
 * and the library can re-verify on any trace the inequalities the iteration
 * guarantees:
 *
 *     a step_{n+1}^2 <= gap_n - gap_{n+1}      a = (2 - lambda L)/(2 lambda)
 *     resid_{n+1} <= step_{n+1}/lambda <= resid_n   (so both are monotone)
 *     gap_n <= C dist_0^2 / (2 lambda n)       C = 1 if lambda <= 1/L,
 *                                              else 1 + 2(lambda L - 1)/(2 - lambda L)
 *
 * plus quasi-Fejer monotonicity of dist_n, support identification for l1
 * composites, and sampled forward-invariance of regions under the map (used
 * to justify localizing a certificate to the region the iterates live in).
 *===========================================================================*/
#pragma once

#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "core.hpp"
#include "funcs.hpp"

namespace geofb {

/*------------------------------------------------------------------- run --*/

struct SolveConfig {
    double lambda = 0.0;
    long max_iters = 1000;
    double tol_step = 0.0;    /* stop when step_n < tol_step (0 = off) */
    double tol_resid = 0.0;   /* stop when resid_n <= tol_resid (0 = off) */
    vec x0;                   /* empty = origin */
};

struct TraceRow {
    long n = 0;
    double objective = 0.0;
    double gap = 0.0;
    double step = 0.0;
    double resid = 0.0;
    double dist = 0.0;
};

struct Trace {
    std::vector<TraceRow> rows;
    std::vector<SupportSet> supports;  /* per row, l1 composites only */
    vec x0;
    vec x_final;
    double lambda = 0.0;
    double lipschitz = 0.0;
    double inf_value = 0.0;
    std::uint64_t problem_hash = 0;
    std::string family;
    std::string stop_reason;
    long iters() const { return static_cast<long>(rows.size()) - 1; }
};

inline SupportSet support_of(const vec& x)
{
    SupportSet s;
    for (std::size_t i = 0; i < x.size(); i++) {
        if (x[i] != 0.0) { s.indices.push_back(static_cast<int>(i)); }
    }
    return s;
}

namespace detail {

inline double safe_resid(const CompositeProblem& P, const vec& x)
{
    if (P.g.eval(x) == inf) { return inf; }
    return min_norm_subgrad(P, x);
}

inline TraceRow make_row(const CompositeProblem& P, long n, const vec& x,
                         double step)
{
    TraceRow row;
    row.n = n;
    row.objective = objective(P, x);
    row.gap = row.objective - P.inf_value;
    row.step = step;
    row.resid = safe_resid(P, x);
    row.dist = P.argmin.available() ? P.argmin.distance(x)
                                    : std::numeric_limits<double>::quiet_NaN();
    return row;
}

} // namespace detail

inline Trace run_fb(const CompositeProblem& P, const SolveConfig& cfg)
{
    validate_step(P, cfg.lambda);
    if (cfg.max_iters < 0) { throw std::invalid_argument("run_fb: max_iters < 0"); }
    vec x = cfg.x0.empty() ? vec(P.dim, 0.0) : cfg.x0;
    if (static_cast<int>(x.size()) != P.dim) {
        throw std::invalid_argument("run_fb: x0 dimension mismatch");
    }

    const bool track_support = (P.g.kind == ProxFn::Kind::l1);
    Trace t;
    t.x0 = x;
    t.lambda = cfg.lambda;
    t.lipschitz = P.h.lipschitz;
    t.inf_value = P.inf_value;
    t.problem_hash = problem_hash(P);
    t.family = P.family;
    t.stop_reason = "max_iters";
    t.rows.reserve(static_cast<std::size_t>(cfg.max_iters) + 1);

    t.rows.push_back(detail::make_row(P, 0, x, 0.0));
    if (track_support) { t.supports.push_back(support_of(x)); }

    for (long n = 1; n <= cfg.max_iters; n++) {
        vec v = x;
        axpy(-cfg.lambda, P.h.grad(x), v);
        vec xn = P.g.prox(cfg.lambda, v);
        const double step = dist2(xn, x);
        x = std::move(xn);
        t.rows.push_back(detail::make_row(P, n, x, step));
        if (track_support) { t.supports.push_back(support_of(x)); }

        const TraceRow& row = t.rows.back();
        if (step == 0.0) { t.stop_reason = "fixed_point"; break; }
        if (cfg.tol_step > 0.0 && step < cfg.tol_step) { t.stop_reason = "step_tol"; break; }
        if (cfg.tol_resid > 0.0 && row.resid <= cfg.tol_resid) { t.stop_reason = "resid_tol"; break; }
    }
    t.x_final = x;
    return t;
}

/* classical iteration for 0.5||Ax-y||^2 (no prox term) */
inline Trace run_landweber(const LinearOperator& A, const vec& y, const SolveConfig& cfg)
{
    return run_fb(make_least_squares(A, y), cfg);
}

/*--------------------------------------------------- per-trace inequalities */

struct EstimateReport {
    bool descent_ok = true;        /* a step^2 <= gap drop */
    bool resid_vs_step_ok = true;  /* resid_{n+1} <= step_{n+1}/lambda */
    bool step_vs_resid_ok = true;  /* step_{n+1}/lambda <= resid_n */
    bool gap_monotone_ok = true;
    bool resid_monotone_ok = true;
    long first_violation = -1;
    std::string violated;
    double worst_margin = 0.0;     /* most negative slack seen */

    bool all_ok() const
    {
        return descent_ok && resid_vs_step_ok && step_vs_resid_ok
            && gap_monotone_ok && resid_monotone_ok;
    }
};

inline EstimateReport check_fb_estimates(const Trace& t)
{
    EstimateReport rep;
    if (t.rows.size() < 2) { return rep; }
    const double a = (2.0 - t.lambda*t.lipschitz)/(2.0*t.lambda);
    const double tol = 1e-12*std::max(1.0, std::fabs(t.rows.front().gap));

    auto flag = [&](bool& ok, long n, const char* name, double slack) {
        if (slack < rep.worst_margin) { rep.worst_margin = slack; }
        if (slack < -tol && ok) {
            ok = false;
            if (rep.first_violation < 0 || n < rep.first_violation) {
                rep.first_violation = n;
                rep.violated = name;
            }
        }
    };

    for (std::size_t i = 1; i < t.rows.size(); i++) {
        const TraceRow& prev = t.rows[i-1];
        const TraceRow& cur = t.rows[i];
        flag(rep.descent_ok, cur.n, "descent",
             (prev.gap - cur.gap) - a*cur.step*cur.step);
        flag(rep.resid_vs_step_ok, cur.n, "resid_vs_step",
             cur.step/t.lambda - cur.resid);
        flag(rep.step_vs_resid_ok, cur.n, "step_vs_resid",
             prev.resid - cur.step/t.lambda);
        flag(rep.gap_monotone_ok, cur.n, "gap_monotone", prev.gap - cur.gap);
        flag(rep.resid_monotone_ok, cur.n, "resid_monotone", prev.resid - cur.resid);
    }
    return rep;
}

/* dist_n nonincreasing (quasi-Fejer); requires a recorded distance column */
struct FejerReport {
    bool monotone = true;
    long first_violation = -1;
    double worst_margin = 0.0;
};

inline FejerReport check_fejer(const Trace& t)
{
    if (t.rows.empty() || std::isnan(t.rows.front().dist)) {
        throw std::logic_error("check_fejer: trace has no distance column");
    }
    FejerReport rep;
    const double tol = 1e-12*std::max(1.0, t.rows.front().dist);
    for (std::size_t i = 1; i < t.rows.size(); i++) {
        const double slack = t.rows[i-1].dist - t.rows[i].dist;
        if (slack < rep.worst_margin) { rep.worst_margin = slack; }
        if (slack < -tol && rep.monotone) {
            rep.monotone = false;
            rep.first_violation = t.rows[i].n;
        }
    }
    return rep;
}

/* gap_n <= C dist_0^2/(2 lambda n) */
struct WorstCaseReport {
    bool holds = true;
    double constant = 1.0;
    double max_ratio = 0.0;   /* max over n of gap_n * 2 lambda n / (C dist_0^2) */
    long argmax = 0;
};

inline WorstCaseReport check_worstcase(const Trace& t)
{
    if (t.rows.empty() || std::isnan(t.rows.front().dist)) {
        throw std::logic_error("check_worstcase: trace has no distance column");
    }
    WorstCaseReport rep;
    const double lamL = t.lambda*t.lipschitz;
    rep.constant = (lamL <= 1.0) ? 1.0 : 1.0 + 2.0*(lamL - 1.0)/(2.0 - lamL);
    const double d0 = t.rows.front().dist;
    if (d0 == 0.0) {
        for (std::size_t i = 1; i < t.rows.size(); i++) {
            if (t.rows[i].gap > 1e-12) { rep.holds = false; rep.argmax = t.rows[i].n; }
        }
        return rep;
    }
    const double tol = 1e-12*std::max(1.0, std::fabs(t.rows.front().gap));
    for (std::size_t i = 1; i < t.rows.size(); i++) {
        const double bound = rep.constant*d0*d0/(2.0*t.lambda*static_cast<double>(t.rows[i].n));
        const double ratio = t.rows[i].gap/bound;
        if (ratio > rep.max_ratio) { rep.max_ratio = ratio; rep.argmax = t.rows[i].n; }
        if (t.rows[i].gap > bound + tol) { rep.holds = false; }
    }
    return rep;
}

/*------------------------------------------------- support identification --*/

struct SupportReport {
    bool identified = false;
    long iter = 0;          /* first index from which the support is frozen */
    SupportSet support;
};

inline SupportReport detect_support_identification(const Trace& t)
{
    if (t.supports.empty()) {
        throw std::logic_error("detect_support_identification: no support column "
                               "(composite is not l1)");
    }
    SupportReport rep;
    rep.support = t.supports.back();
    std::size_t last_change = 0;
    for (std::size_t i = 1; i < t.supports.size(); i++) {
        if (!(t.supports[i].indices == t.supports[i-1].indices)) { last_change = i; }
    }
    rep.iter = static_cast<long>(last_change);
    /* frozen support needs at least one stable step to count as identified */
    rep.identified = last_change + 1 < t.supports.size();
    return rep;
}

/*---------------------------------------------------- forward invariance --*/

struct InvarianceRegion {
    enum class Kind { ball, sublevel, resid_level, halfspace };
    Kind kind = Kind::ball;
    vec center;            /* ball */
    double radius = 1.0;   /* ball */
    double level = 0.0;    /* sublevel: f <= level; resid_level: residual <= level */
    vec normal;            /* halfspace: <normal, x> <= offset */
    double offset = 0.0;

    bool contains(const CompositeProblem& P, const vec& x) const
    {
        switch (kind) {
        case Kind::ball:
            return dist2(x, center) <= radius*(1.0 + 1e-12);
        case Kind::sublevel:
            return objective(P, x) <= level*(1.0 + 1e-12) + 1e-300;
        case Kind::resid_level: {
            const double r = detail::safe_resid(P, x);
            return r <= level*(1.0 + 1e-12) + 1e-300;
        }
        case Kind::halfspace:
            return dot(normal, x) <= offset + 1e-12*std::max(1.0, std::fabs(offset));
        }
        return false;
    }

    std::string describe() const
    {
        switch (kind) {
        case Kind::ball:        return "ball(r=" + fmt17(radius) + ")";
        case Kind::sublevel:    return "sublevel(" + fmt17(level) + ")";
        case Kind::resid_level: return "resid_level(" + fmt17(level) + ")";
        case Kind::halfspace:   return "halfspace(offset=" + fmt17(offset) + ")";
        }
        return "?";
    }
};

struct InvarianceReport {
    bool invariant = true;      /* no escape found among the samples */
    long samples_tested = 0;
    vec counterexample;         /* sample that escaped, if any */
    vec image;                  /* its forward-backward image */
    double lambda = 0.0;
    std::uint64_t problem_hash = 0;
    std::string region;
};

/* Sampled forward-invariance of a region under the forward-backward map.
 * A found escape refutes invariance exactly; absence of one is evidence,
 * not proof, and is labeled as such by the caller. */
inline InvarianceReport check_fb_invariance(const CompositeProblem& P, double lambda,
                                            const InvarianceRegion& region,
                                            long n_samples = 2000,
                                            std::uint64_t seed = 0x1abe11ed)
{
    validate_step(P, lambda);
    InvarianceReport rep;
    rep.lambda = lambda;
    rep.problem_hash = problem_hash(P);
    rep.region = region.describe();

    rng r(mix_seed(seed, "invariance:" + region.describe()));
    const int d = P.dim;

    vec anchor(d, 0.0);
    if (region.kind == InvarianceRegion::Kind::ball) {
        anchor = region.center;
    } else if (P.argmin.available()) {
        anchor = P.argmin.project(vec(d, 0.0));
    }

    auto draw = [&]() -> vec {
        if (region.kind == InvarianceRegion::Kind::ball) {
            vec z = r.gaussian_vec(d);
            const double nz = nrm2(z);
            if (nz == 0.0) { return anchor; }
            vec x = anchor;
            const double u = std::pow(r.uniform01(), 1.0/d);
            axpy(region.radius*u/nz, z, x);
            return x;
        }
        /* rejection from a growing box around the anchor */
        double R = 1.0;
        long proposals = 0, since_grow = 0, hits_since_grow = 0;
        for (;;) {
            vec x = anchor;
            for (int k = 0; k < d; k++) { x[k] += r.uniform(-R, R); }
            proposals++;
            since_grow++;
            if (region.contains(P, x)) { return x; }
            if (since_grow >= 1000 && hits_since_grow < 10) {
                R *= 2.0;
                since_grow = 0;
                hits_since_grow = 0;
            }
            if (proposals >= 100000) {
                throw std::runtime_error("check_fb_invariance: could not sample the region");
            }
        }
    };

    for (long s = 0; s < n_samples; s++) {
        const vec x = draw();
        const vec y = fb_map(P, lambda, x);
        rep.samples_tested++;
        if (!region.contains(P, y)) {
            rep.invariant = false;
            rep.counterexample = x;
            rep.image = y;
            break;
        }
    }
    return rep;
}

/*------------------------------------------------------------- trace I/O --*/

/* flat export: `n,gap,step,resid,dist,support_size`, the dist column only
 * when an argmin oracle produced it, support sizes only for l1 composites.
 * The absolute objective stays in the JSON export; the CSV carries the gap. */
inline void trace_to_csv(const Trace& t, std::ostream& os)
{
    const bool with_dist = !t.rows.empty() && !std::isnan(t.rows[0].dist);
    const bool with_support = !t.supports.empty();
    os << "n,gap,step,resid";
    if (with_dist) { os << ",dist"; }
    if (with_support) { os << ",support_size"; }
    os << '\n';
    for (std::size_t i = 0; i < t.rows.size(); i++) {
        const TraceRow& row = t.rows[i];
        os << row.n << ',' << fmt17(row.gap) << ',' << fmt17(row.step) << ','
           << fmt17(row.resid);
        if (with_dist) { os << ',' << fmt17(row.dist); }
        if (with_support) { os << ',' << t.supports[i].indices.size(); }
        os << '\n';
    }
}

/* reads any column subset the writer produces; a missing dist column comes
 * back NaN, support sizes are not reconstructed, and objective is filled
 * with the gap (the additive constant is not part of the flat format) */
inline std::vector<TraceRow> trace_rows_from_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) { throw std::runtime_error("trace csv: empty file"); }
    if (!line.empty() && line.back() == '\r') { line.pop_back(); }
    bool with_dist = false, with_support = false;
    if (line == "n,gap,step,resid") {
    } else if (line == "n,gap,step,resid,dist") {
        with_dist = true;
    } else if (line == "n,gap,step,resid,support_size") {
        with_support = true;
    } else if (line == "n,gap,step,resid,dist,support_size") {
        with_dist = true;
        with_support = true;
    } else {
        throw std::runtime_error("trace csv: bad header '" + line + "'");
    }
    std::vector<TraceRow> rows;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') { line.pop_back(); }
        if (line.empty()) { continue; }
        TraceRow row;
        row.dist = std::numeric_limits<double>::quiet_NaN();
        char* p = line.data();
        char* end = nullptr;
        row.n = std::strtol(p, &end, 10);
        std::vector<double*> fields{&row.gap, &row.step, &row.resid};
        if (with_dist) { fields.push_back(&row.dist); }
        for (double* field : fields) {
            if (*end != ',') { throw std::runtime_error("trace csv: bad row '" + line + "'"); }
            p = end + 1;
            *field = std::strtod(p, &end);
        }
        if (with_support) {
            if (*end != ',') { throw std::runtime_error("trace csv: bad row '" + line + "'"); }
            p = end + 1;
            std::strtol(p, &end, 10);
        }
        if (*end != '\0') { throw std::runtime_error("trace csv: bad row '" + line + "'"); }
        row.objective = row.gap;
        rows.push_back(row);
    }
    return rows;
}

inline nlohmann::json trace_to_json(const Trace& t)
{
    nlohmann::json j;
    j["lambda"] = t.lambda;
    j["lipschitz"] = t.lipschitz;
    j["inf_value"] = t.inf_value;
    j["problem_hash"] = t.problem_hash;
    j["family"] = t.family;
    j["stop_reason"] = t.stop_reason;
    j["x0"] = t.x0;
    j["x_final"] = t.x_final;
    nlohmann::json rows = nlohmann::json::array();
    for (const TraceRow& row : t.rows) {
        nlohmann::json r = nlohmann::json::array();
        r.push_back(row.n);
        r.push_back(row.objective);
        r.push_back(row.gap);
        r.push_back(row.step);
        r.push_back(row.resid);
        if (std::isnan(row.dist)) { r.push_back(nullptr); } else { r.push_back(row.dist); }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    if (!t.supports.empty()) {
        nlohmann::json sup = nlohmann::json::array();
        for (const SupportSet& s : t.supports) { sup.push_back(s.indices); }
        j["supports"] = std::move(sup);
    }
    return j;
}

inline Trace trace_from_json(const nlohmann::json& j)
{
    Trace t;
    t.lambda = j.at("lambda").get<double>();
    t.lipschitz = j.at("lipschitz").get<double>();
    t.inf_value = j.at("inf_value").get<double>();
    t.problem_hash = j.at("problem_hash").get<std::uint64_t>();
    t.family = j.at("family").get<std::string>();
    t.stop_reason = j.at("stop_reason").get<std::string>();
    t.x0 = j.at("x0").get<vec>();
    t.x_final = j.at("x_final").get<vec>();
    for (const auto& r : j.at("rows")) {
        TraceRow row;
        row.n = r.at(0).get<long>();
        row.objective = r.at(1).get<double>();
        row.gap = r.at(2).get<double>();
        row.step = r.at(3).get<double>();
        row.resid = r.at(4).get<double>();
        row.dist = r.at(5).is_null() ? std::numeric_limits<double>::quiet_NaN()
                                     : r.at(5).get<double>();
        t.rows.push_back(row);
    }
    if (j.contains("supports")) {
        for (const auto& s : j.at("supports")) {
            SupportSet set;
            set.indices = s.get<std::vector<int>>();
            t.supports.push_back(std::move(set));
        }
    }
    return t;
}

} // namespace geofb
