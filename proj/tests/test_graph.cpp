#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfp/errors.hpp"
#include "mfp/graph.hpp"

#include <algorithm>
#include <set>

using namespace mfp;

namespace {

const ext_int minf = ext_int::minus_inf();
const ext_int pinf = ext_int::plus_inf();

// C >= 0; One >= 1; N >= C + One; C >= min(N, 100)  — a bounded counter.
struct counter_fixture {
    var_id c, n, one;
    constraint_system P;

    counter_fixture() {
        system_builder b;
        c = b.add_var("C");
        n = b.add_var("N");
        one = b.add_var("One");
        b.add_bi(c, bi_fun::constant(ext_int(0)), {});
        b.add_bi(one, bi_fun::constant(ext_int(1)), {});
        b.add_bi(n, bi_fun::add(), {c, one});
        b.add_bi(c, bi_fun::guarded_min(ext_int(100)), {n});
        P = b.build();
    }
};

// Checks the structural invariant of a cycle path against its system.
void check_cycle_invariant(const constraint_system& P, const cycle_path& cy) {
    const std::size_t n = cy.length();
    REQUIRE(n > 0);
    REQUIRE(cy.vars.size() == n);
    for (std::size_t i = 0; i < n; ++i) {
        const constraint& c = P.at(cy.constraints[i]);
        CHECK(c.output == cy.vars[i]);
        const auto ins = c.input_vars();
        const var_id pred = cy.vars[(i + n - 1) % n];
        CHECK(std::find(ins.begin(), ins.end(), pred) != ins.end());
    }
}

}  // namespace

TEST_CASE("bipartite graph layout and adjacency") {
    counter_fixture f;
    const program_graph G = analyze_graph(f.P);

    CHECK(G.n_vars == 3);
    CHECK(G.n_cons == 4);
    CHECK(G.is_var_vertex(f.c));
    CHECK(!G.is_var_vertex(G.con_vertex(0)));
    CHECK(G.con_of_vertex(G.con_vertex(2)) == 2);

    // constraint 2 (N >= C + One) reads C and One, writes N
    const auto& from_c = G.adj[G.var_vertex(f.c)];
    CHECK(std::find(from_c.begin(), from_c.end(), G.con_vertex(2)) != from_c.end());
    const auto& from_c2 = G.adj[G.con_vertex(2)];
    CHECK(from_c2 == std::vector<std::uint32_t>{f.n});
    // constraint 0 (C >= 0) has no inputs
    CHECK(G.adj[G.con_vertex(0)] == std::vector<std::uint32_t>{f.c});
}

TEST_CASE("strongly connected components and their kinds") {
    counter_fixture f;
    const program_graph G = analyze_graph(f.P);

    // {C, N, add, min} form one cyclic component
    const auto scc = G.scc_of[f.c];
    CHECK(G.scc_of[f.n] == scc);
    CHECK(G.scc_of[G.con_vertex(2)] == scc);
    CHECK(G.scc_of[G.con_vertex(3)] == scc);
    CHECK(G.kinds[scc] == program_graph::scc_kind::cyclic);

    // constants and One are their own transient components
    CHECK(G.scc_of[f.one] != scc);
    CHECK(G.kinds[G.scc_of[f.one]] == program_graph::scc_kind::transient);
    CHECK(G.kinds[G.scc_of[G.con_vertex(0)]] == program_graph::scc_kind::transient);

    CHECK(G.is_flat());
}

TEST_CASE("two self-loop constraints on one variable are not flat") {
    system_builder b;
    const var_id x = b.add_var("X");
    const var_id one = b.add_var("One");
    b.add_bi(one, bi_fun::constant(ext_int(1)), {});
    b.add_bi(x, bi_fun::add(), {x, one});
    b.add_bi(x, bi_fun::guarded_min(ext_int(5)), {x});
    const constraint_system P = b.build();

    const program_graph G = analyze_graph(P);
    CHECK(!G.is_flat());
    CHECK(G.kinds[G.scc_of[x]] == program_graph::scc_kind::other);
}

TEST_CASE("extracting the unique cycle of a cyclic component") {
    counter_fixture f;
    const program_graph G = analyze_graph(f.P);
    const cycle_path cy = scc_cycle(G, G.scc_of[f.c]);

    CHECK(cy.length() == 2);
    CHECK(std::set<var_id>(cy.vars.begin(), cy.vars.end()) ==
          std::set<var_id>{f.c, f.n});
    check_cycle_invariant(f.P, cy);
}

TEST_CASE("a single self-loop is a cycle of length one") {
    system_builder b;
    const var_id x = b.add_var("X");
    const var_id one = b.add_var("One");
    b.add_bi(one, bi_fun::constant(ext_int(1)), {});
    b.add_bi(x, bi_fun::add(), {x, one});
    const constraint_system P = b.build();

    const program_graph G = analyze_graph(P);
    CHECK(G.is_flat());
    CHECK(G.kinds[G.scc_of[x]] == program_graph::scc_kind::cyclic);
    const cycle_path cy = scc_cycle(G, G.scc_of[x]);
    CHECK(cy.length() == 1);
    CHECK(cy.vars == std::vector<var_id>{x});
    check_cycle_invariant(P, cy);
}

TEST_CASE("last-writer cycles") {
    system_builder b;
    const var_id x = b.add_var("X");
    const var_id y = b.add_var("Y");
    b.add_bi(x, bi_fun::identity(), {y});   // 0
    b.add_bi(y, bi_fun::identity(), {x});   // 1
    b.add_bi(x, bi_fun::constant(ext_int(0)), {});  // 2
    const constraint_system P = b.build();

    SUBCASE("mutual identities induce a two-cycle") {
        const std::vector<std::uint32_t> lw = {0, 1};
        const auto cy = lambda_cycle(P, lw);
        REQUIRE(cy.has_value());
        CHECK(cy->length() == 2);
        check_cycle_invariant(P, *cy);
    }
    SUBCASE("a constant writer breaks the cycle") {
        const std::vector<std::uint32_t> lw = {2, 1};
        CHECK(!lambda_cycle(P, lw).has_value());
    }
    SUBCASE("no writers, no cycle") {
        const std::vector<std::uint32_t> lw = {no_constraint, no_constraint};
        CHECK(!lambda_cycle(P, lw).has_value());
    }
}

TEST_CASE("last-writer cycle through a designated variable") {
    system_builder b;
    const var_id a = b.add_var("A");
    const var_id bb = b.add_var("B");
    const var_id c = b.add_var("C");
    const var_id d = b.add_var("D");
    const var_id e = b.add_var("E");
    b.add_bi(a, bi_fun::identity(), {bb});  // 0
    b.add_bi(bb, bi_fun::identity(), {a});  // 1
    b.add_bi(c, bi_fun::identity(), {d});   // 2
    b.add_bi(d, bi_fun::identity(), {c});   // 3
    b.add_bi(e, bi_fun::identity(), {a});   // 4
    const constraint_system P = b.build();
    const std::vector<std::uint32_t> lw = {0, 1, 2, 3, 4};

    const auto through_c = lambda_cycle_through(P, lw, c);
    REQUIRE(through_c.has_value());
    CHECK(std::set<var_id>(through_c->vars.begin(), through_c->vars.end()) ==
          std::set<var_id>{c, d});
    check_cycle_invariant(P, *through_c);

    // E is written from A but no cycle returns to E.
    CHECK(!lambda_cycle_through(P, lw, e).has_value());

    // The unconstrained search finds the lexicographically first cycle (A-B).
    const auto any = lambda_cycle(P, lw);
    REQUIRE(any.has_value());
    CHECK(std::set<var_id>(any->vars.begin(), any->vars.end()) ==
          std::set<var_id>{a, bb});
}

TEST_CASE("valuations travel along renamings in both directions") {
    renaming kappa;
    kappa.to_original = {0, 1, 0};
    CHECK(kappa.derived_size() == 3);
    CHECK(kappa(2) == 0);

    valuation rho(2);
    rho.set(0, ext_int(5));
    rho.set(1, ext_int(7));
    const valuation derived = compose(rho, kappa);
    CHECK(derived.size() == 3);
    CHECK(derived.at(0) == ext_int(5));
    CHECK(derived.at(1) == ext_int(7));
    CHECK(derived.at(2) == ext_int(5));

    valuation rp(3);
    rp.set(0, ext_int(1));
    rp.set(1, ext_int(9));
    rp.set(2, ext_int(100));
    const valuation back = rename_back(kappa, rp, 3);
    CHECK(back.size() == 3);
    CHECK(back.at(0) == ext_int(100));  // join of coords 0 and 2
    CHECK(back.at(1) == ext_int(9));
    CHECK(back.at(2) == minf);          // empty preimage
}

TEST_CASE("cyclic flattening produces a fresh unfolded copy of the cycle") {
    counter_fixture f;
    const program_graph G = analyze_graph(f.P);
    const cycle_path cy = scc_cycle(G, G.scc_of[f.c]);
    const flattening F = cyclic_flattening(f.P, cy);

    CHECK(F.system.n_vars() == f.P.n_vars() + 2);
    CHECK(F.system.size() == 2);
    CHECK(F.kappa.derived_size() == F.system.n_vars());
    for (var_id v = 0; v < f.P.n_vars(); ++v) CHECK(F.kappa(v) == v);
    CHECK(is_unfolding(f.P, F));

    // Every flattened constraint outputs a fresh copy, and the off-cycle
    // input (One) keeps its original name.
    bool saw_one = false;
    for (const constraint& c : F.system.constraints()) {
        CHECK(c.output >= f.P.n_vars());
        for (var_id in : c.input_vars()) {
            if (in == f.one) saw_one = true;
            CHECK((in >= f.P.n_vars() || in == f.one));
        }
    }
    CHECK(saw_one);

    // The flattened system is itself a single fresh cycle: flat and cyclic.
    const program_graph FG = analyze_graph(F.system);
    CHECK(FG.is_flat());

    // Solving the copy above a concrete seed behaves like the original cycle.
    valuation rho(f.P.n_vars());
    rho.set(f.c, ext_int(0));
    rho.set(f.one, ext_int(1));
    valuation seeded = compose(rho, F.kappa);
    const auto [sol, ok] = kleene_iterate(F.system, seeded, 1000);
    CHECK(ok);
    const valuation back = rename_back(F.kappa, sol, f.P.n_vars());
    CHECK(back.at(f.c) == ext_int(100));
    CHECK(back.at(f.n) == ext_int(101));
}

TEST_CASE("cyclic flattening rejects paths that are not elementary cycles") {
    counter_fixture f;
    cycle_path bogus;
    bogus.vars = {f.c};
    bogus.constraints = {0};  // C >= 0 reads nothing, so no self-edge
    CHECK_THROWS_AS(cyclic_flattening(f.P, bogus), validation_error);

    cycle_path mismatch;
    mismatch.vars = {f.c, f.n};
    mismatch.constraints = {3};  // lengths differ
    CHECK_THROWS_AS(cyclic_flattening(f.P, mismatch), validation_error);
}

TEST_CASE("tampered flattenings are not unfoldings") {
    counter_fixture f;
    const program_graph G = analyze_graph(f.P);
    const flattening F = cyclic_flattening(f.P, scc_cycle(G, G.scc_of[f.c]));

    flattening bad = F;
    std::vector<constraint> cs = bad.system.constraints();
    for (auto& c : cs)
        if (c.is_bi() && c.bi().fun.which() == bi_fun::kind::guarded_min)
            c.body = bi_body{bi_fun::guarded_min(ext_int(99)), c.bi().inputs};
    bad.system = bad.system.with_constraints(std::move(cs));
    CHECK(!is_unfolding(f.P, bad));
}

TEST_CASE("generic solve with the identity strategy on a flat system") {
    system_builder b;
    const var_id x = b.add_var("X");
    const var_id y = b.add_var("Y");
    b.add_bi(x, bi_fun::constant(ext_int(2)), {});
    b.add_bi(y, bi_fun::add(), {x, x});
    const constraint_system P = b.build();

    const generic_solve_result r = generic_solve(P, identity_strategy(), 10);
    CHECK(r.converged);
    CHECK(r.val.at(x) == ext_int(2));
    CHECK(r.val.at(y) == ext_int(4));
    CHECK(r.rounds <= 2);
}

TEST_CASE("generic solve validates strategy output") {
    // Two competing self-loop writers of X form a non-flat component, so
    // the identity strategy's flattening must be rejected.
    system_builder b;
    const var_id x = b.add_var("X");
    const var_id one = b.add_var("One");
    b.add_bi(one, bi_fun::constant(ext_int(1)), {});
    b.add_bi(x, bi_fun::add(), {x, one});
    b.add_bi(x, bi_fun::guarded_min(ext_int(5)), {x});
    const constraint_system P = b.build();

    CHECK_THROWS_AS(generic_solve(P, identity_strategy(), 10), validation_error);
}

TEST_CASE("generic solve refuses systems with tests") {
    system_builder b;
    const var_id x = b.add_var("X");
    b.add_bi(x, bi_fun::constant(ext_int(1)), {});
    b.add_test(x, test_fun::geq(ext_int(0)), x, x);
    const constraint_system P = b.build();
    CHECK_THROWS_AS(generic_solve(P, identity_strategy(), 10), validation_error);
}

TEST_CASE("greedy max-raise strategy solves the bounded counter exactly") {
    counter_fixture f;
    const generic_solve_result r = generic_solve(f.P, max_raise_strategy(), 100);
    CHECK(r.converged);
    CHECK(r.val.at(f.c) == ext_int(100));
    CHECK(r.val.at(f.n) == ext_int(101));
    CHECK(r.val.at(f.one) == ext_int(1));
    CHECK(r.rounds <= 10);  // accelerated, not iterated value by value
}

TEST_CASE("greedy max-raise strategy accelerates an unbounded pump") {
    system_builder b;
    const var_id x = b.add_var("X");
    const var_id one = b.add_var("One");
    b.add_bi(x, bi_fun::constant(ext_int(0)), {});
    b.add_bi(one, bi_fun::constant(ext_int(1)), {});
    b.add_bi(x, bi_fun::add(), {x, one});
    const constraint_system P = b.build();

    const generic_solve_result r = generic_solve(P, max_raise_strategy(), 100);
    CHECK(r.converged);
    CHECK(r.val.at(x) == pinf);
    CHECK(r.val.at(one) == ext_int(1));
    CHECK(r.rounds <= 5);
}

TEST_CASE("generic solve reports when the round cap stops it") {
    counter_fixture f;
    const generic_solve_result r = generic_solve(f.P, max_raise_strategy(), 1);
    CHECK(!r.converged);
    CHECK(r.rounds == 1);
    CHECK(r.val.leq(valuation(f.P.n_vars(), pinf)));
}
