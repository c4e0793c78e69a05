#include "mfp/errors.hpp"
#include "mfp/formats.hpp"
#include "mfp/frontend.hpp"
#include "mfp/interval.hpp"
#include "mfp/intsolve.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_parse = 2;
constexpr int exit_oracle = 3;
constexpr int exit_internal = 4;

struct run_config {
    std::string input;
    std::string format = "text";
    bool oracle = false;
    std::uint64_t max_iters = 100000;
    bool trace = false;
    std::string point;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw mfp::parse_error("cannot open file: " + path, 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

mfp::solve_options solver_options(const run_config& cfg) {
    mfp::solve_options opt;
    if (cfg.trace) opt.trace = &std::cerr;
    return opt;
}

int solve_int_cmd(const run_config& cfg) {
    mfp::constraint_system P = mfp::load_ics_text(read_file(cfg.input));
    mfp::valuation sol = mfp::solve_integer(P, solver_options(cfg));

    if (cfg.format == "json") {
        ordered_json out = ordered_json::object();
        for (mfp::var_id v = 0; v < P.n_vars(); ++v)
            out[P.var_name(v)] = sol.at(v).to_string();
        std::cout << out.dump(2) << "\n";
    } else {
        for (mfp::var_id v = 0; v < P.n_vars(); ++v)
            std::cout << P.var_name(v) << " = " << sol.at(v).to_string() << "\n";
    }

    if (cfg.oracle) {
        auto [ref, converged] = mfp::kleene_iterate(P, mfp::valuation::bottom(P.n_vars()),
                                                    cfg.max_iters);
        if (!converged) {
            std::cout << "oracle: no convergence within " << cfg.max_iters << " rounds\n";
        } else if (ref == sol) {
            std::cout << "oracle: agree (" << cfg.max_iters << " round cap)\n";
        } else {
            for (mfp::var_id v = 0; v < P.n_vars(); ++v)
                if (!(sol.at(v) == ref.at(v)))
                    std::cout << "oracle: disagree at " << P.var_name(v) << ": solver="
                              << sol.at(v).to_string() << " oracle=" << ref.at(v).to_string()
                              << "\n";
            return exit_oracle;
        }
    }
    return exit_ok;
}

int solve_interval_cmd(const run_config& cfg) {
    mfp::interval_system P = mfp::load_ivs_text(read_file(cfg.input));
    mfp::iv_valuation sol = mfp::solve_interval(P, solver_options(cfg));

    if (cfg.format == "json") {
        ordered_json out = ordered_json::object();
        for (mfp::var_id v = 0; v < P.n_vars(); ++v)
            out[P.var_name(v)] = sol.at(v).to_string();
        std::cout << out.dump(2) << "\n";
    } else {
        for (mfp::var_id v = 0; v < P.n_vars(); ++v)
            std::cout << P.var_name(v) << " = " << sol.at(v).to_string() << "\n";
    }

    if (cfg.oracle) {
        mfp::iv_kleene_result ref = mfp::kleene_interval(P, cfg.max_iters);
        if (!ref.converged) {
            std::cout << "oracle: no convergence within " << cfg.max_iters << " rounds\n";
        } else {
            bool ok = true;
            for (mfp::var_id v = 0; v < P.n_vars(); ++v)
                if (ref.val.at(v) != sol.at(v)) {
                    std::cout << "oracle: disagree at " << P.var_name(v) << ": solver="
                              << sol.at(v).to_string() << " oracle=" << ref.val.at(v).to_string()
                              << "\n";
                    ok = false;
                }
            if (!ok) return exit_oracle;
            std::cout << "oracle: agree (" << ref.rounds_run << " rounds)\n";
        }
    }
    return exit_ok;
}

int analyze_cmd(const run_config& cfg) {
    mfp::program prog = mfp::parse_program(read_file(cfg.input));
    mfp::gen_result gen = mfp::gen_constraints(prog);
    mfp::iv_valuation sol = mfp::solve_interval(gen.system, solver_options(cfg));

    const auto& flow = gen.flow;
    if (!cfg.point.empty()) {
        bool found = false;
        for (const std::string& p : flow.points) found = found || p == cfg.point;
        if (!found) throw mfp::parse_error("unknown program point: " + cfg.point, 0);
    }

    if (cfg.format == "json") {
        ordered_json out = ordered_json::object();
        for (std::size_t i = 0; i < flow.points.size(); ++i) {
            if (!cfg.point.empty() && flow.points[i] != cfg.point) continue;
            ordered_json pt = ordered_json::object();
            for (const auto& [name, id] : flow.point_vars[i]) pt[name] = sol.at(id).to_string();
            out[flow.points[i]] = std::move(pt);
        }
        std::cout << out.dump(2) << "\n";
    } else {
        for (std::size_t i = 0; i < flow.points.size(); ++i) {
            if (!cfg.point.empty() && flow.points[i] != cfg.point) continue;
            std::cout << flow.points[i] << ":";
            if (flow.point_vars[i].empty()) std::cout << " (no variables)";
            for (const auto& [name, id] : flow.point_vars[i])
                std::cout << " " << name << " = " << sol.at(id).to_string();
            std::cout << "\n";
        }
    }

    if (cfg.oracle) {
        mfp::iv_kleene_result ref = mfp::kleene_interval(gen.system, cfg.max_iters);
        if (!ref.converged) {
            std::cout << "oracle: no convergence within " << cfg.max_iters << " rounds\n";
        } else {
            bool ok = true;
            for (std::size_t i = 0; i < flow.points.size(); ++i)
                for (const auto& [name, id] : flow.point_vars[i])
                    if (ref.val.at(id) != sol.at(id)) {
                        std::cout << "oracle: disagree at " << flow.points[i] << "/" << name
                                  << ": solver=" << sol.at(id).to_string()
                                  << " oracle=" << ref.val.at(id).to_string() << "\n";
                        ok = false;
                    }
            if (!ok) return exit_oracle;
            std::cout << "oracle: agree (" << ref.rounds_run << " rounds)\n";
        }
    }
    return exit_ok;
}

void add_common(CLI::App* cmd, run_config& cfg, bool with_point) {
    cmd->add_option("input", cfg.input, "input file")->required();
    cmd->add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_flag("--oracle", cfg.oracle, "cross-check against plain Kleene iteration");
    cmd->add_option("--max-iters", cfg.max_iters, "oracle round cap")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--trace", cfg.trace, "log accelerations to stderr");
    if (with_point) cmd->add_option("--point", cfg.point, "report only this program point");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact least-solution solver for integer and interval constraint systems"};
    app.require_subcommand(1);

    run_config cfg;
    CLI::App* c_int = app.add_subcommand("solve-int", "solve an integer constraint system (.ics)");
    add_common(c_int, cfg, false);
    CLI::App* c_iv =
        app.add_subcommand("solve-interval", "solve an interval constraint system (.ivs)");
    add_common(c_iv, cfg, false);
    CLI::App* c_an = app.add_subcommand("analyze", "analyze a while-language program (.wl)");
    add_common(c_an, cfg, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return exit_parse;
    }

    try {
        if (c_int->parsed()) return solve_int_cmd(cfg);
        if (c_iv->parsed()) return solve_interval_cmd(cfg);
        return analyze_cmd(cfg);
    } catch (const mfp::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_parse;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_internal;
    }
}
