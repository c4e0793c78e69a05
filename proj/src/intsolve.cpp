#include "mfp/intsolve.hpp"

#include "mfp/errors.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>
#include <utility>

namespace mfp {

namespace {

void count_apps(solve_stats* st, std::uint64_t n = 1) {
    if (st) st->apps += n;
}

// ⟦C⟧(ρ) ⊑ ρ, counting every constraint application performed.
bool is_post_solution(const constraint_system& P, const valuation& rho, solve_stats* st) {
    for (std::size_t i = 0; i < P.size(); ++i) {
        count_apps(st);
        if (rho.at(P.at(i).output) < eval_constraint(P.at(i), rho)) return false;
    }
    return true;
}

std::vector<bool> upper_saturated_set(const constraint_system& P, const valuation& rho) {
    std::vector<bool> up(P.size());
    for (std::size_t i = 0; i < P.size(); ++i) up[i] = saturation(P.at(i), rho).upper;
    return up;
}

void trace_cycle_header(std::ostream& os, const constraint_system& P, const cycle_path& cyc) {
    os << "accelerate cycle ";
    const std::size_t n = cyc.length();
    os << P.var_name(cyc.vars[n - 1]);
    for (std::size_t i = 0; i < n; ++i)
        os << " --c" << cyc.constraints[i] << "--> " << P.var_name(cyc.vars[i]);
}

void trace_vals(std::ostream& os, const constraint_system& P, const cycle_path& cyc,
                const valuation& rho) {
    os << "{";
    for (std::size_t i = 0; i < cyc.length(); ++i) {
        if (i) os << ", ";
        os << P.var_name(cyc.vars[i]) << ":" << rho.at(cyc.vars[i]).to_string();
    }
    os << "}";
}

}  // namespace

saturation_status saturation(const constraint& c, const valuation& rho) {
    if (!c.is_bi()) throw validation_error("saturation: test constraints have no saturation bounds");
    auto [lo, hi] = fun_bounds(c.bi().fun);
    const ext_int& out = rho.at(c.output);
    return saturation_status{out >= hi, out <= lo};
}

valuation cyclic_solve(const constraint_system& P, valuation rho, const solve_options& opt) {
    if (!P.all_bi()) throw validation_error("cyclic_solve: system must be bounded-increasing");
    if (P.size() == 0) throw validation_error("cyclic_solve: empty constraint system");
    if (rho.size() != P.n_vars()) throw validation_error("cyclic_solve: valuation size mismatch");

    program_graph G = analyze_graph(P);
    // Every constraint must sit in one strongly connected component that carries a
    // unique elementary cycle; anything else is out of this unit's scope.
    const std::uint32_t home = G.scc_of[G.con_vertex(0)];
    for (std::size_t i = 1; i < P.size(); ++i)
        if (G.scc_of[G.con_vertex(static_cast<std::uint32_t>(i))] != home)
            throw validation_error("cyclic_solve: constraints span several components");
    if (G.kinds[home] != program_graph::scc_kind::cyclic)
        throw validation_error("cyclic_solve: component is not a single elementary cycle");

    cycle_path cyc = scc_cycle(G, home);
    assert(cyc.length() == P.size());

    solve_stats* st = opt.stats;

    // Two ascending passes around the cycle, joining at each output.
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < cyc.length(); ++i) {
            const constraint& c = P.at(cyc.constraints[i]);
            count_apps(st);
            ext_int img = eval_constraint(c, rho);
            if (rho.at(c.output) < img) rho.set(c.output, std::move(img));
        }
    }

    if (is_post_solution(P, rho, st)) return rho;

    // Not stable after two rounds: the cycle pumps, so its variables blow up to +∞...
    for (std::size_t i = 0; i < cyc.length(); ++i) rho.set(cyc.vars[i], ext_int::plus_inf());

    // ...and two descending passes prune the overshoot back down to the least solution.
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < cyc.length(); ++i) {
            const constraint& c = P.at(cyc.constraints[i]);
            count_apps(st);
            ext_int img = eval_constraint(c, rho);
            if (img < rho.at(c.output)) rho.set(c.output, std::move(img));
        }
    }
    return rho;
}

valuation solve_bi(const constraint_system& P, valuation rho, const solve_options& opt) {
    if (!P.all_bi()) throw validation_error("solve_bi: system must be bounded-increasing");
    if (rho.size() != P.n_vars()) throw validation_error("solve_bi: valuation size mismatch");

    solve_stats* st = opt.stats;
    const std::size_t m = P.size();
    const bool book = st != nullptr || opt.trace != nullptr;

    std::vector<bool> upper_at_entry;
    if (book) upper_at_entry = upper_saturated_set(P, rho);

    // ρ ← ρ0 ∨ ⟦C⟧(ρ0): all images taken simultaneously at the initial valuation.
    {
        valuation base = rho;
        for (std::size_t i = 0; i < m; ++i) {
            count_apps(st);
            ext_int img = eval_constraint(P.at(i), base);
            if (rho.at(P.at(i).output) < img) rho.set(P.at(i).output, std::move(img));
        }
    }

    std::uint64_t outer = 0;
    while (!is_post_solution(P, rho, st)) {
        ++outer;

        // Round-robin passes, remembering for each variable the constraint that
        // last raised it. A value whose size crosses the soft threshold triggers
        // acceleration of a pending cycle through that variable right away.
        std::vector<std::uint32_t> last_writer(P.n_vars(), no_constraint);
        std::optional<cycle_path> pending;
        for (std::size_t pass = 0; pass <= m && !pending; ++pass) {
            bool raised = false;
            for (std::size_t ci = 0; ci < m; ++ci) {
                const constraint& c = P.at(ci);
                count_apps(st);
                ext_int img = eval_constraint(c, rho);
                if (rho.at(c.output) < img) {
                    const std::size_t bits = bit_length(img);
                    rho.set(c.output, std::move(img));
                    last_writer[c.output] = static_cast<std::uint32_t>(ci);
                    raised = true;
                    if (opt.soft_accel_bits != 0 && bits > opt.soft_accel_bits) {
                        if (auto cyc = lambda_cycle_through(P, last_writer, c.output)) {
                            pending = std::move(cyc);
                            if (st) ++st->watchdog_fires;
                            break;
                        }
                    }
                }
            }
            if (!raised) break;
        }

        std::optional<cycle_path> cyc =
            pending ? std::move(pending) : lambda_cycle(P, last_writer);
        if (!cyc) continue;  // no cycle among the last writers: recheck, usually done

        std::vector<bool> upper_before;
        if (opt.trace) upper_before = upper_saturated_set(P, rho);

        flattening F = cyclic_flattening(P, *cyc);
        valuation lifted = compose(rho, F.kappa);
        valuation solved = cyclic_solve(F.system, std::move(lifted), opt);
        valuation back = rename_back(F.kappa, solved, P.n_vars());

        if (opt.trace) {
            trace_cycle_header(*opt.trace, P, *cyc);
            *opt.trace << " rho_before ";
            trace_vals(*opt.trace, P, *cyc, rho);
        }

        rho.join_with(back);
        if (st) ++st->accelerations;

        if (opt.trace) {
            *opt.trace << " rho_after ";
            trace_vals(*opt.trace, P, *cyc, rho);
            std::vector<bool> upper_after = upper_saturated_set(P, rho);
            *opt.trace << " newly_upper_saturated [";
            bool first = true;
            for (std::size_t i = 0; i < m; ++i)
                if (upper_after[i] && !upper_before[i]) {
                    if (!first) *opt.trace << ", ";
                    *opt.trace << "c" << i;
                    first = false;
                }
            *opt.trace << "]\n";
        }
    }

    if (st) {
        std::vector<bool> upper_at_exit = upper_saturated_set(P, rho);
        std::uint64_t newly = 0;
        for (std::size_t i = 0; i < m; ++i)
            if (upper_at_exit[i] && !upper_at_entry[i]) ++newly;
        st->bi_calls.push_back(solve_stats::bi_call{outer, newly});
    }
    return rho;
}

std::optional<constraint> activate(const constraint& c, const valuation& rho) {
    assert(c.is_test());
    const test_body& t = c.test();
    const ext_int& guard = rho.at(t.guard_in);
    const bool passes =
        t.fun.which == test_fun::kind::geq ? guard >= t.fun.threshold : guard > t.fun.threshold;
    if (!passes) return std::nullopt;
    return constraint{c.output, bi_body{bi_fun::identity(), {t.value_in}}};
}

valuation solve_integer(const constraint_system& P, const solve_options& opt) {
    solve_stats* st = opt.stats;
    valuation rho = valuation::bottom(P.n_vars());

    std::vector<constraint> active;  // BI part plus the active forms gathered so far
    std::vector<std::uint32_t> tests;
    for (std::size_t i = 0; i < P.size(); ++i) {
        if (P.at(i).is_bi())
            active.push_back(P.at(i));
        else
            tests.push_back(static_cast<std::uint32_t>(i));
    }
    std::vector<bool> activated(P.size(), false);

    while (!is_post_solution(P, rho, st)) {
        if (st) ++st->integer_outer_loops;
        constraint_system sub = P.with_constraints(active);
        rho = solve_bi(sub, std::move(rho), opt);
        for (std::uint32_t ti : tests) {
            if (activated[ti]) continue;
            if (std::optional<constraint> form = activate(P.at(ti), rho)) {
                activated[ti] = true;
                active.push_back(std::move(*form));
            }
        }
    }
    return rho;
}

}  // namespace mfp
