#pragma once

// Command-line front end. Exit codes: 0 success, 2 bad spec or arguments,
// 3 no equilibrium found within budget, 4 internal inconsistency.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "drgt/engine.hpp"

namespace drgt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSpecError = 2;
inline constexpr int kExitNoEquilibrium = 3;
inline constexpr int kExitInternal = 4;

inline int cli_main(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"equilibrium solver for finite games with uncertain payoffs"};
    app.name("drgt");

    std::string spec_path, fixture_name, method, format = "plain";
    int starts = -1;
    std::int64_t seed = -1;
    bool list_fixtures = false;

    app.add_option("--spec", spec_path, "path to a JSON game spec");
    app.add_option("--fixture", fixture_name, "run a built-in fixture (see --list-fixtures)");
    app.add_option("--method", method, "override the optimizer: bfgs or steepest");
    app.add_option("--starts", starts, "override the number of multistart seeds");
    app.add_option("--seed", seed, "override the master seed (default 42)");
    app.add_option("--format", format, "output format: plain or csv");
    app.add_flag("--list-fixtures", list_fixtures, "list built-in fixtures and exit");

    try {
        std::vector<const char*> argv;
        argv.push_back("drgt");
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "drgt: " << e.what() << "\n";
        return kExitSpecError;
    }

    try {
        fixtures_self_check();
    } catch (const std::exception& e) {
        err << "drgt: " << e.what() << "\n";
        return kExitInternal;
    }

    if (list_fixtures) {
        for (const auto& f : builtin_fixtures()) out << f.name << "  " << f.description << "\n";
        return kExitOk;
    }

    try {
        if (spec_path.empty() == fixture_name.empty())
            throw InputError("exactly one of --spec or --fixture is required");

        GameSpecFile spec;
        if (!fixture_name.empty()) {
            spec = fixture_by_name(fixture_name).spec;
        } else {
            std::ifstream in(spec_path);
            if (!in) throw InputError("cannot read spec file '" + spec_path + "'");
            std::ostringstream text;
            text << in.rdbuf();
            spec = parse_spec_text(text.str());
        }

        SolverOverrides overrides;
        if (!method.empty()) overrides.method = method_from_string(method);
        if (starts >= 0) overrides.num_starts = starts;
        if (seed >= 0) overrides.seed = static_cast<std::uint64_t>(seed);
        const OutputFormat fmt = format_from_string(format);

        const EquilibriumTable table = run(spec, overrides);
        out << emit_table(table, fmt);
        if (table.rows.empty()) {
            err << "drgt: no equilibria found within budget (" << table.starts_converged << "/"
                << table.starts_attempted << " starts converged on path " << table.path << ")\n";
            return kExitNoEquilibrium;
        }
        return kExitOk;
    } catch (const InputError& e) {
        err << "drgt: " << e.what() << "\n";
        return kExitSpecError;
    } catch (const EmptySetError& e) {
        err << "drgt: " << e.what() << "\n";
        return kExitSpecError;
    } catch (const std::exception& e) {
        err << "drgt: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace drgt::cli
