#pragma once

#include "mfp/extint.hpp"
#include "mfp/interval.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mfp {

// Abstract syntax for the while-language: assignments, if/else and while over
// integer expressions, with conditions restricted to VAR <op> CONSTANT.

struct expr;
using expr_ptr = std::unique_ptr<expr>;

struct expr {
  enum class kind : std::uint8_t { constant, variable, add, mul, neg };

  kind which;
  bigint value;      // constant
  std::string name;  // variable
  expr_ptr lhs;      // add/mul/neg
  expr_ptr rhs;      // add/mul
};

enum class cmp_op : std::uint8_t { lt, le, eq, ge, gt, ne };

struct condition {
  std::string var;
  cmp_op op = cmp_op::eq;
  bigint threshold;
};

struct stmt {
  enum class kind : std::uint8_t { assign, branch, loop };

  kind which;
  // assign
  std::string target;
  expr_ptr value;
  // branch / loop
  condition cond;
  std::vector<stmt> then_body;  // loop body for loops
  std::vector<stmt> else_body;
};

struct program {
  std::vector<stmt> body;
};

// Throws parse_error with line/column on any lexical or syntax error.
program parse_program(std::string_view source);

// Control-flow points of the generated system: per point, the source-level
// variables and their constraint-variable ids.
struct flow_info {
  std::vector<std::string> points;
  std::vector<std::vector<std::pair<std::string, var_id>>> point_vars;
};

struct gen_result {
  interval_system system;
  flow_info flow;
};

// One interval variable per (program point, source variable). Entry variables
// start at top; guards meet with the condition's half-line ("!=" is a sound
// no-op); assignments evaluate their expression compositionally over the
// source point, and a variable-free right-hand side is anchored to the
// target's prior interval through a zero-multiplication. The analysis is
// per-variable: on an unreachable arm the guarded variable (and anything
// computed from it, including re-assignments of it) goes empty, while
// fresh constants assigned to other variables may still flow out of the
// arm into the join. That keeps every point a sound over-approximation
// without threading a reachability token through every edge.
gen_result gen_constraints(const program& prog);

}  // namespace mfp
