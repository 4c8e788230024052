/* geofb command-line driver; see cli.hpp for the command contracts. */

#include <cstdint>
#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <geofb/cli.hpp>

int main(int argc, char** argv)
{
    CLI::App app{"forward-backward splitting with geometric rate certificates"};
    app.require_subcommand(0, 1);

    app.add_subcommand("list", "list the built-in experiments");
    app.add_subcommand("table", "print the regime table");

    std::string experiment;
    std::string out_dir = geofb::cli::default_out_dir();
    std::uint64_t seed = 0;
    std::vector<std::string> overrides;
    auto* run = app.add_subcommand("run", "run an experiment or a config file");
    run->add_option("experiment", experiment, "built-in name or path to a config JSON")
        ->required();
    run->add_option("--out", out_dir, "output root (default: $GEOFB_OUT or ./out)");
    auto* seed_opt = run->add_option("--seed", seed, "override the experiment seed");
    run->add_option("--set", overrides, "override key=value (repeatable)");

    std::string trace_path, pred_path, report_path;
    auto* certify = app.add_subcommand("certify", "certify an exported trace CSV");
    certify->add_option("--trace", trace_path, "trace CSV file")->required();
    certify->add_option("--prediction", pred_path, "prediction JSON with a, b, c, p")
        ->required();
    certify->add_option("--out", report_path, "write the report JSON here (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (app.got_subcommand("list")) { return geofb::cli::cmd_list(); }
        if (app.got_subcommand("table")) { return geofb::cli::cmd_table(); }
        if (app.got_subcommand("run")) {
            const std::uint64_t* sp = seed_opt->count() > 0 ? &seed : nullptr;
            return geofb::cli::cmd_run(experiment, out_dir, sp, overrides);
        }
        if (app.got_subcommand("certify")) {
            return geofb::cli::cmd_certify(trace_path, pred_path, report_path);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "geofb: %s\n", e.what());
        return 1;
    }

    std::fputs(app.help().c_str(), stdout);
    return 1;
}
