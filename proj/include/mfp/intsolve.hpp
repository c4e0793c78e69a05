#pragma once

#include "mfp/csys.hpp"
#include "mfp/graph.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace mfp {

// Whether a constraint can still move its output: upper means rho(out) has
// already reached f(top,...,top), lower means it is still at or below
// f(bot,...,bot).
struct saturation_status {
  bool upper = false;
  bool lower = false;
};

// BI constraints only; test constraints are rejected.
saturation_status saturation(const constraint& c, const valuation& rho);

struct solve_stats {
  // Single-constraint image computations performed by the solver,
  // including solution checks.
  std::uint64_t apps = 0;
  std::uint64_t accelerations = 0;
  std::uint64_t watchdog_fires = 0;
  // Outer iterations of solve_integer.
  std::uint64_t integer_outer_loops = 0;

  struct bi_call {
    std::uint64_t outer_loops = 0;
    std::uint64_t newly_upper_saturated = 0;
  };
  std::vector<bi_call> bi_calls;
};

struct solve_options {
  solve_stats* stats = nullptr;
  // Acceleration log (one line per acceleration) when set.
  std::ostream* trace = nullptr;
  // Once a raised value grows past this many bits, solve_bi tries to
  // accelerate a lambda-cycle through the growing variable right away
  // instead of finishing its pass block. Results are unchanged; this only
  // keeps exploding products/towers from exhausting memory. 0 disables.
  std::size_t soft_accel_bits = 4096;
};

// Exact least-solution solver for a cyclic system (all constraints on one
// elementary cycle of the program graph, external inputs allowed): two
// ascending joined passes around the cycle; if not yet a solution, the
// cycle variables jump to +inf and two descending meet passes trim them
// back. Returns the least solution of P above rho0.
valuation cyclic_solve(const constraint_system& P, valuation rho0,
                       const solve_options& opt = {});

// Exact least-solution solver for bounded-increasing systems: round-robin
// raise passes plus cyclic acceleration of last-writer cycles. Returns the
// least solution of P above rho0.
valuation solve_bi(const constraint_system& P, valuation rho0,
                   const solve_options& opt = {});

// The active form X >= id(value) of a test constraint whose guard clears
// its threshold under rho, or nothing.
std::optional<constraint> activate(const constraint& test_c, const valuation& rho);

// Exact least-solution solver for full systems (BI + tests): alternates
// solve_bi on the BI part with activation of newly enabled tests.
valuation solve_integer(const constraint_system& P, const solve_options& opt = {});

} // namespace mfp
