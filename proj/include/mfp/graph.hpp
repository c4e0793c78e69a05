#pragma once

#include "mfp/csys.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace mfp {

// Bipartite program graph of a constraint system: one vertex per variable
// and per constraint, with edges input -> constraint -> output. Vertices
// 0..n_vars-1 are variables; n_vars..n_vars+size-1 are constraints.
class program_graph {
public:
  enum class scc_kind : std::uint8_t {
    transient, // no internal edge (always a singleton here)
    cyclic,    // internal edges form exactly one elementary cycle
    other
  };

  std::size_t n_vars = 0;
  std::size_t n_cons = 0;
  std::vector<std::vector<std::uint32_t>> adj; // sorted successor lists

  std::vector<std::uint32_t> scc_of;            // vertex -> scc index
  std::vector<std::vector<std::uint32_t>> sccs; // members, sorted
  std::vector<scc_kind> kinds;

  bool flat = false; // no SCC holds two constraints with one output

  bool is_flat() const { return flat; }

  std::uint32_t var_vertex(var_id v) const { return v; }
  std::uint32_t con_vertex(std::uint32_t c) const {
    return static_cast<std::uint32_t>(n_vars + c);
  }
  bool is_var_vertex(std::uint32_t u) const { return u < n_vars; }
  std::uint32_t con_of_vertex(std::uint32_t u) const {
    return static_cast<std::uint32_t>(u - n_vars);
  }
};

program_graph analyze_graph(const constraint_system& P);

// An elementary cycle X0 -> c1 -> X1 -> ... -> cn -> Xn = X0 through the
// program graph, stored as vars[i] = X_{i+1 mod n} ... concretely:
// constraints[i] outputs vars[i] and reads vars[(i + n - 1) % n].
struct cycle_path {
  std::vector<var_id> vars;
  std::vector<std::uint32_t> constraints;

  std::size_t length() const { return constraints.size(); }
};

// Extracts the unique elementary cycle of a cyclic SCC, starting at its
// lowest-numbered variable vertex.
cycle_path scc_cycle(const program_graph& G, std::uint32_t scc_index);

// last_writer[X] names the constraint that last raised X (no_constraint if
// none); it always outputs X. The induced graph has an edge X -> Y exactly
// when X is an input of last_writer[Y]. lambda_cycle finds the first
// elementary cycle by depth-first search from the lowest-index variable;
// the _through variant only accepts cycles passing through the given
// variable (breadth-first back to it).
std::optional<cycle_path> lambda_cycle(const constraint_system& P,
                                       const std::vector<std::uint32_t>& last_writer);
std::optional<cycle_path> lambda_cycle_through(
    const constraint_system& P, const std::vector<std::uint32_t>& last_writer,
    var_id through);

// Maps each variable of a derived system back to a variable of the
// original one.
struct renaming {
  std::vector<var_id> to_original; // indexed by derived var id

  var_id operator()(var_id derived) const { return to_original[derived]; }
  std::size_t derived_size() const { return to_original.size(); }
};

struct flattening {
  constraint_system system;
  renaming kappa;
};

// rho' = rho o kappa: valuation over the derived variables.
valuation compose(const valuation& rho, const renaming& kappa);

// Pointwise join over the kappa-preimage; empty preimage yields -inf.
valuation rename_back(const renaming& kappa, const valuation& rho_prime,
                      std::size_t n_original);

// Builds the cyclic flattening of the given elementary cycle: fresh copies
// Z1..Zn of the cycle variables, each cycle constraint rewritten to output
// Zi and to read Z_{i-1} in place of its on-cycle input occurrence (other
// inputs keep their original names). kappa is the identity extended with
// kappa(Zi) = Xi. Throws validation_error if the path is not an elementary
// cycle of P's program graph.
flattening cyclic_flattening(const constraint_system& P, const cycle_path& cycle);

// True when every constraint of F.system, with variables renamed through
// F.kappa, is literally a constraint of P (the unfolding condition).
bool is_unfolding(const constraint_system& P, const flattening& F);

// Chooses a flattening of P given the current valuation, or nothing if no
// useful flattening exists (generic_solve then stops unconverged).
using flattening_strategy = std::function<std::optional<flattening>(
    const constraint_system&, const valuation&)>;

// Identity flattening: valid whenever P itself is flat.
flattening_strategy identity_strategy();

// Greedy strategy: for every variable, keep the one constraint whose
// right-hand side is currently largest under the valuation, yielding a
// one-writer-per-variable subsystem under the identity renaming. One
// writer per variable means no SCC can hold two constraints with a shared
// output, so the subsystem is always flat; and whenever the valuation is
// not yet a solution, some selected constraint strictly raises it, so
// every round makes progress. Pumping cycles are accelerated as soon as
// all of their constraints become the selected writers simultaneously.
flattening_strategy max_raise_strategy();

struct generic_solve_result {
  valuation val;
  bool converged = false;
  std::uint64_t rounds = 0;
};

// The flattening-based solve loop: while rho is not a solution, obtain a
// flattening from the strategy (validated against the unfolding and
// flatness conditions), solve it exactly above rho o kappa, and join the
// result back. Stops unconverged when round_cap is hit or the strategy
// returns nothing.
generic_solve_result generic_solve(const constraint_system& P,
                                   const flattening_strategy& strategy,
                                   std::uint64_t round_cap);

} // namespace mfp
