#pragma once

/* Command-line driver: list, run, certify, table.
 *
 * `geofb run <name|config.json>` executes one experiment and writes its
 * artifacts under {out}/{name}/ -- trace.csv, report.json, plot.svg (and
 * table.txt for the table artifact).  The output root comes from --out, the
 * GEOFB_OUT environment variable, or defaults to ./out.  Exit codes: 0 when
 * every certification passes, 2 when a certification fails (report.json then
 * carries first_violation), 1 for configuration or usage errors.
 *
 * `geofb certify --trace t.csv --prediction p.json` replays the
 * solver-independent certification on an exported trace: the descent and
 * gradient inequalities with the provided constants (a, b), plus the rate
 * envelope induced by kappa = a/(b^2 c^2) and the exponent p.  The verdict
 * matches what `run` computes inline on the same trace and constants.
 *
 * Experiments write to distinct directories keyed by name, so independent
 * runs can proceed concurrently under the same output root.
 *
 * Everything is deterministic for a fixed spec and seed: rerunning a command
 * produces byte-identical artifacts.
 */

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "experiments.hpp"

namespace geofb {
namespace cli {

inline std::string default_out_dir()
{
    const char* env = std::getenv("GEOFB_OUT");
    if (env != nullptr && *env != '\0') { return env; }
    return "out";
}

inline void write_file(const std::filesystem::path& p, const std::string& content)
{
    std::ofstream f(p, std::ios::binary);
    if (!f) { throw std::runtime_error("cannot open for writing: " + p.string()); }
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) { throw std::runtime_error("short write: " + p.string()); }
}

inline std::string read_file(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    if (!f) { throw std::invalid_argument("cannot read file: " + p.string()); }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline int cmd_list()
{
    for (const auto& [name, desc] : builtin_catalog()) {
        std::printf("%-26s %s\n", name.c_str(), desc.c_str());
    }
    return 0;
}

inline int cmd_table()
{
    std::fputs(render_regime_table().c_str(), stdout);
    return 0;
}

inline bool has_output(const ExperimentSpec& spec, const char* kind)
{
    for (const auto& o : spec.outputs) {
        if (o == kind) { return true; }
    }
    return false;
}

inline int cmd_run(const std::string& name_or_config, const std::string& out_dir,
                   const std::uint64_t* seed_override,
                   const std::vector<std::string>& overrides)
{
    ExperimentSpec spec;
    bool is_builtin = false;
    for (const auto& n : builtin_names()) { is_builtin = is_builtin || n == name_or_config; }
    if (is_builtin) {
        spec = builtin_spec(name_or_config);
    } else if (std::filesystem::exists(name_or_config)) {
        spec = spec_from_json(nlohmann::json::parse(read_file(name_or_config)));
    } else {
        throw std::invalid_argument("unknown experiment and no such config file: '" +
                                    name_or_config + "'");
    }
    if (seed_override != nullptr) { spec.seed = *seed_override; }
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        }
        apply_override(spec, kv.substr(0, eq), kv.substr(eq + 1));
    }

    const ExperimentResult res = run_experiment(spec);

    const std::filesystem::path dir = std::filesystem::path(out_dir) / res.name;
    std::filesystem::create_directories(dir);
    if (res.has_trace && has_output(spec, "csv")) {
        std::ostringstream csv;
        trace_to_csv(res.trace, csv);
        write_file(dir / "trace.csv", csv.str());
    }
    write_file(dir / "report.json", res.report.dump(2) + "\n");
    if (!res.plot.empty() && has_output(spec, "svg")) {
        write_file(dir / "plot.svg", svg_loglog(res.plot, res.name, "n", "value"));
    }
    if (!res.table_text.empty()) { write_file(dir / "table.txt", res.table_text); }

    if (res.pass) {
        std::printf("%s: PASS (artifacts in %s)\n", res.name.c_str(), dir.string().c_str());
        return 0;
    }
    std::printf("%s: FAIL (first violation at n=%ld; artifacts in %s)\n", res.name.c_str(),
                res.first_violation, dir.string().c_str());
    return 2;
}

/* replay certification on an exported trace with provided constants */
inline int cmd_certify(const std::string& trace_path, const std::string& pred_path,
                       const std::string& report_path)
{
    std::istringstream ts(read_file(trace_path));
    const std::vector<TraceRow> rows = trace_rows_from_csv(ts);
    if (rows.empty()) { throw std::invalid_argument("certify: trace has no rows"); }

    const nlohmann::json pj = nlohmann::json::parse(read_file(pred_path));
    for (const char* k : {"a", "b", "c", "p"}) {
        if (!pj.contains(k) || !pj[k].is_number()) {
            throw std::invalid_argument(std::string("certify: prediction JSON needs number '") +
                                        k + "'");
        }
    }
    const double a = pj["a"].get<double>();
    const double b = pj["b"].get<double>();
    const double c = pj["c"].get<double>();
    const double p = pj["p"].get<double>();

    const DescentAudit audit = general_descent_check(rows, a, b);

    const double kap = kappa_general(a, b, c);
    const double r0 = rows[0].gap;
    if (!(r0 > 0.0)) { throw std::invalid_argument("certify: first gap must be positive"); }
    const double cpp = (p > 2.0 || p < 0.0) ? cprime(p, kap, r0) : 0.0;
    RatePrediction pred = predict(p, kap, r0, 0.0, cpp);
    pred.a = a;
    pred.b = b;
    pred.c = c;

    Trace t;
    t.rows = rows;
    const CertReport rep = certify_trace(t, pred);

    nlohmann::json out;
    out["trace"] = trace_path;
    out["constants"] = {{"a", a}, {"b", b}, {"c", c}, {"p", p}};
    out["kappa"] = kap;
    out["descent_ok"] = audit.descent_ok;
    out["gradient_ok"] = audit.gradient_ok;
    out["first_descent_violation"] = audit.first_descent_violation;
    out["first_gradient_violation"] = audit.first_gradient_violation;
    out["prediction"] = prediction_to_json(pred);
    out["certification"] = cert_report_to_json(rep);
    const bool pass = audit.pass() && rep.pass;
    long first = -1;
    if (audit.first_descent_violation >= 0) { first = audit.first_descent_violation; }
    if (audit.first_gradient_violation >= 0
        && (first < 0 || audit.first_gradient_violation < first)) {
        first = audit.first_gradient_violation;
    }
    if (first < 0) { first = rep.first_violation; }
    out["pass"] = pass;
    out["first_violation"] = first;

    const std::string text = out.dump(2) + "\n";
    if (!report_path.empty()) { write_file(report_path, text); }
    else { std::fputs(text.c_str(), stdout); }
    if (!report_path.empty()) {
        std::printf("certify: %s\n", pass ? "PASS" : "FAIL");
    }
    return pass ? 0 : 2;
}

}  // namespace cli
}  // namespace geofb
