#include "mfp/graph.hpp"

#include "mfp/errors.hpp"
#include "mfp/intsolve.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>

namespace mfp {

program_graph analyze_graph(const constraint_system& P) {
  program_graph G;
  G.n_vars = P.n_vars();
  G.n_cons = P.size();
  const std::size_t n = G.n_vars + G.n_cons;
  G.adj.assign(n, {});
  for (std::uint32_t ci = 0; ci < P.size(); ++ci) {
    const constraint& c = P.at(ci);
    G.adj[G.con_vertex(ci)].push_back(G.var_vertex(c.output));
    for (var_id in : c.input_vars()) G.adj[G.var_vertex(in)].push_back(G.con_vertex(ci));
  }
  for (auto& succ : G.adj) std::sort(succ.begin(), succ.end());

  // Iterative Tarjan.
  constexpr std::uint32_t unvisited = ~std::uint32_t{0};
  std::vector<std::uint32_t> index(n, unvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::uint32_t> stack;
  G.scc_of.assign(n, 0);
  std::uint32_t counter = 0;

  struct frame {
    std::uint32_t v;
    std::size_t child;
  };
  std::vector<frame> frames;

  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    frames.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      frame& f = frames.back();
      if (f.child < G.adj[f.v].size()) {
        const std::uint32_t w = G.adj[f.v][f.child++];
        if (index[w] == unvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        const std::uint32_t v = f.v;
        if (low[v] == index[v]) {
          std::vector<std::uint32_t> members;
          for (;;) {
            const std::uint32_t w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            members.push_back(w);
            if (w == v) break;
          }
          std::sort(members.begin(), members.end());
          const auto id = static_cast<std::uint32_t>(G.sccs.size());
          for (std::uint32_t w : members) G.scc_of[w] = id;
          G.sccs.push_back(std::move(members));
        }
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      }
    }
  }

  // Classify each SCC and decide flatness.
  G.kinds.resize(G.sccs.size());
  G.flat = true;
  for (std::uint32_t s = 0; s < G.sccs.size(); ++s) {
    const auto& members = G.sccs[s];
    std::size_t internal_edges = 0;
    bool out_degree_one = true;
    for (std::uint32_t u : members) {
      std::size_t deg = 0;
      for (std::uint32_t w : G.adj[u])
        if (G.scc_of[w] == s) ++deg;
      internal_edges += deg;
      if (deg != 1) out_degree_one = false;
    }
    if (internal_edges == 0)
      G.kinds[s] = program_graph::scc_kind::transient;
    else if (out_degree_one && internal_edges == members.size())
      G.kinds[s] = program_graph::scc_kind::cyclic;
    else
      G.kinds[s] = program_graph::scc_kind::other;

    std::set<var_id> outputs;
    for (std::uint32_t u : members) {
      if (G.is_var_vertex(u)) continue;
      const var_id out = P.at(G.con_of_vertex(u)).output;
      if (!outputs.insert(out).second) G.flat = false;
    }
  }
  return G;
}

cycle_path scc_cycle(const program_graph& G, std::uint32_t scc_index) {
  assert(G.kinds[scc_index] == program_graph::scc_kind::cyclic);
  const auto& members = G.sccs[scc_index];
  std::uint32_t start = ~std::uint32_t{0};
  for (std::uint32_t u : members)
    if (G.is_var_vertex(u)) {
      start = u;
      break;
    }
  assert(start != ~std::uint32_t{0} && "bipartite cycle has a variable");

  const auto internal_succ = [&](std::uint32_t u) {
    for (std::uint32_t w : G.adj[u])
      if (G.scc_of[w] == scc_index) return w;
    assert(false && "cyclic SCC vertex lost its successor");
    return u;
  };

  cycle_path cycle;
  std::uint32_t u = start;
  do {
    const std::uint32_t c = internal_succ(u);
    const std::uint32_t x = internal_succ(c);
    cycle.constraints.push_back(G.con_of_vertex(c));
    cycle.vars.push_back(static_cast<var_id>(x));
    u = x;
  } while (u != start);
  return cycle;
}

namespace {

// Successor lists of the last-writer graph: edge X -> Y when X is an input
// of last_writer[Y].
std::vector<std::vector<var_id>> lambda_successors(
    const constraint_system& P, const std::vector<std::uint32_t>& last_writer) {
  std::vector<std::vector<var_id>> succ(P.n_vars());
  for (var_id y = 0; y < last_writer.size(); ++y) {
    if (last_writer[y] == no_constraint) continue;
    for (var_id x : P.at(last_writer[y]).input_vars()) succ[x].push_back(y);
  }
  for (auto& s : succ) std::sort(s.begin(), s.end());
  return succ;
}

cycle_path path_to_cycle(const std::vector<var_id>& path,
                         const std::vector<std::uint32_t>& last_writer) {
  // path = p0 -> p1 -> ... -> pk with a closing edge pk -> p0. Constraint i
  // outputs vars[i] and reads vars[i-1 (mod n)].
  cycle_path cycle;
  const std::size_t n = path.size();
  for (std::size_t i = 1; i <= n; ++i) {
    const var_id v = path[i % n];
    cycle.vars.push_back(v);
    cycle.constraints.push_back(last_writer[v]);
  }
  return cycle;
}

} // namespace

std::optional<cycle_path> lambda_cycle(const constraint_system& P,
                                       const std::vector<std::uint32_t>& last_writer) {
  const auto succ = lambda_successors(P, last_writer);
  const std::size_t n = P.n_vars();
  enum : std::uint8_t { white, grey, black };
  std::vector<std::uint8_t> color(n, white);

  struct frame {
    var_id v;
    std::size_t child;
  };
  std::vector<frame> stack;
  std::vector<var_id> path;

  for (var_id root = 0; root < n; ++root) {
    if (color[root] != white) continue;
    stack.push_back({root, 0});
    color[root] = grey;
    path.push_back(root);
    while (!stack.empty()) {
      frame& f = stack.back();
      if (f.child < succ[f.v].size()) {
        const var_id w = succ[f.v][f.child++];
        if (color[w] == grey) {
          // Elementary cycle: the path segment from w to f.v.
          const auto it = std::find(path.begin(), path.end(), w);
          return path_to_cycle(std::vector<var_id>(it, path.end()), last_writer);
        }
        if (color[w] == white) {
          color[w] = grey;
          path.push_back(w);
          stack.push_back({w, 0});
        }
      } else {
        color[f.v] = black;
        path.pop_back();
        stack.pop_back();
      }
    }
  }
  return std::nullopt;
}

std::optional<cycle_path> lambda_cycle_through(
    const constraint_system& P, const std::vector<std::uint32_t>& last_writer,
    var_id through) {
  const auto succ = lambda_successors(P, last_writer);
  // Breadth-first tree from `through`; any reached vertex with an edge back
  // to `through` closes an elementary cycle along its tree path.
  std::vector<var_id> parent(P.n_vars(), no_constraint);
  std::vector<var_id> queue{through};
  parent[through] = through;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const var_id u = queue[head];
    for (var_id w : succ[u]) {
      if (w == through) {
        std::vector<var_id> rev;
        for (var_id x = u;; x = parent[x]) {
          rev.push_back(x);
          if (x == through) break;
        }
        return path_to_cycle({rev.rbegin(), rev.rend()}, last_writer);
      }
      if (parent[w] == no_constraint) {
        parent[w] = u;
        queue.push_back(w);
      }
    }
  }
  return std::nullopt;
}

valuation compose(const valuation& rho, const renaming& kappa) {
  valuation out(kappa.derived_size());
  for (var_id v = 0; v < kappa.derived_size(); ++v) out.set(v, rho.at(kappa(v)));
  return out;
}

valuation rename_back(const renaming& kappa, const valuation& rho_prime,
                      std::size_t n_original) {
  valuation out(n_original);
  for (var_id v = 0; v < kappa.derived_size(); ++v)
    if (out.at(kappa(v)) < rho_prime.at(v)) out.set(kappa(v), rho_prime.at(v));
  return out;
}

namespace {

constraint rename_inputs(const constraint& c, var_id from, var_id to, var_id out) {
  constraint r = c;
  r.output = out;
  if (r.is_bi()) {
    auto& b = std::get<bi_body>(r.body);
    for (auto& in : b.inputs)
      if (in == from) {
        in = to;
        break; // inputs are pairwise distinct
      }
  } else {
    auto& t = std::get<test_body>(r.body);
    if (t.guard_in == from)
      t.guard_in = to;
    else if (t.value_in == from)
      t.value_in = to;
  }
  return r;
}

void check_elementary_cycle(const constraint_system& P, const cycle_path& cycle) {
  const std::size_t n = cycle.length();
  if (n == 0 || cycle.vars.size() != n)
    throw validation_error("cycle path is empty or malformed");
  std::set<var_id> vs(cycle.vars.begin(), cycle.vars.end());
  std::set<std::uint32_t> cs(cycle.constraints.begin(), cycle.constraints.end());
  if (vs.size() != n || cs.size() != n)
    throw validation_error("cycle path is not elementary");
  for (std::size_t i = 0; i < n; ++i) {
    if (cycle.constraints[i] >= P.size())
      throw validation_error("cycle path references an unknown constraint");
    const constraint& c = P.at(cycle.constraints[i]);
    if (c.output != cycle.vars[i])
      throw validation_error("cycle constraint does not output its cycle variable");
    const var_id pred = cycle.vars[(i + n - 1) % n];
    const auto ins = c.input_vars();
    if (std::find(ins.begin(), ins.end(), pred) == ins.end())
      throw validation_error("cycle constraint does not read its predecessor");
  }
}

} // namespace

flattening cyclic_flattening(const constraint_system& P, const cycle_path& cycle) {
  check_elementary_cycle(P, cycle);
  const std::size_t n = cycle.length();

  std::vector<std::string> names = P.var_names();
  const auto taken = [&](const std::string& s) {
    return std::find(names.begin(), names.end(), s) != names.end();
  };
  renaming kappa;
  kappa.to_original.resize(P.n_vars());
  for (var_id v = 0; v < P.n_vars(); ++v) kappa.to_original[v] = v;

  std::vector<var_id> copies(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string name = P.var_name(cycle.vars[i]) + "'";
    while (taken(name)) name += "'";
    names.push_back(name);
    copies[i] = static_cast<var_id>(names.size() - 1);
    kappa.to_original.push_back(cycle.vars[i]);
  }

  std::vector<constraint> cs;
  cs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const var_id pred = cycle.vars[(i + n - 1) % n];
    const var_id pred_copy = copies[(i + n - 1) % n];
    cs.push_back(rename_inputs(P.at(cycle.constraints[i]), pred, pred_copy, copies[i]));
  }
  return flattening{constraint_system(std::move(names), std::move(cs)),
                    std::move(kappa)};
}

bool is_unfolding(const constraint_system& P, const flattening& F) {
  if (F.kappa.derived_size() != F.system.n_vars()) return false;
  for (var_id v = 0; v < F.system.n_vars(); ++v)
    if (F.kappa(v) >= P.n_vars()) return false;
  for (const constraint& c : F.system.constraints()) {
    constraint renamed = c;
    renamed.output = F.kappa(c.output);
    if (renamed.is_bi()) {
      for (auto& in : std::get<bi_body>(renamed.body).inputs) in = F.kappa(in);
    } else {
      auto& t = std::get<test_body>(renamed.body);
      t.guard_in = F.kappa(t.guard_in);
      t.value_in = F.kappa(t.value_in);
    }
    const auto& cs = P.constraints();
    if (std::find(cs.begin(), cs.end(), renamed) == cs.end()) return false;
  }
  return true;
}

flattening_strategy identity_strategy() {
  return [](const constraint_system& P,
            const valuation&) -> std::optional<flattening> {
    renaming kappa;
    kappa.to_original.resize(P.n_vars());
    for (var_id v = 0; v < P.n_vars(); ++v) kappa.to_original[v] = v;
    return flattening{P, std::move(kappa)};
  };
}

flattening_strategy max_raise_strategy() {
  return [](const constraint_system& P,
            const valuation& rho) -> std::optional<flattening> {
    // Pick, per output variable, the constraint with the largest current
    // right-hand side. Ties go to the earliest constraint.
    std::vector<std::uint32_t> pick(P.n_vars(), no_constraint);
    std::vector<ext_int> best(P.n_vars());
    for (std::uint32_t ci = 0; ci < P.size(); ++ci) {
      const constraint& c = P.at(ci);
      ext_int img = eval_constraint(c, rho);
      if (pick[c.output] == no_constraint || best[c.output] < img) {
        pick[c.output] = ci;
        best[c.output] = std::move(img);
      }
    }

    std::vector<std::uint32_t> used;
    for (var_id v = 0; v < P.n_vars(); ++v)
      if (pick[v] != no_constraint) used.push_back(pick[v]);
    if (used.empty()) return std::nullopt;
    std::sort(used.begin(), used.end());
    std::vector<constraint> cs;
    cs.reserve(used.size());
    for (std::uint32_t ci : used) cs.push_back(P.at(ci));

    renaming kappa;
    kappa.to_original.resize(P.n_vars());
    for (var_id v = 0; v < P.n_vars(); ++v) kappa.to_original[v] = v;
    return flattening{P.with_constraints(std::move(cs)), std::move(kappa)};
  };
}

generic_solve_result generic_solve(const constraint_system& P,
                                   const flattening_strategy& strategy,
                                   std::uint64_t round_cap) {
  if (!P.all_bi())
    throw validation_error("generic_solve handles bounded-increasing systems only");
  generic_solve_result r;
  r.val = valuation::bottom(P.n_vars());
  for (;;) {
    if (is_solution(P, r.val)) {
      r.converged = true;
      return r;
    }
    if (r.rounds >= round_cap) return r;
    ++r.rounds;
    auto f = strategy(P, r.val);
    if (!f) return r;
    if (!is_unfolding(P, *f))
      throw validation_error("strategy returned a non-unfolding");
    if (!analyze_graph(f->system).is_flat())
      throw validation_error("strategy returned a non-flat system");
    valuation above = compose(r.val, f->kappa);
    valuation solved = solve_bi(f->system, std::move(above));
    r.val.join_with(rename_back(f->kappa, solved, P.n_vars()));
  }
}

} // namespace mfp
