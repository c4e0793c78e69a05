#pragma once

#include "mfp/extint.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mfp {

// Index into a system's variable table.
using var_id = std::uint32_t;

inline constexpr std::uint32_t no_constraint = ~std::uint32_t{0};

// X >= f(X1, ..., Xk) with f from the bounded-increasing catalog.
// Inputs are pairwise distinct (system_builder enforces this by aliasing).
struct bi_body {
  bi_fun fun;
  std::vector<var_id> inputs;

  friend bool operator==(const bi_body& a, const bi_body& b) {
    return a.fun == b.fun && a.inputs == b.inputs;
  }
};

// X >= theta(guard, value): passes `value` through when `guard` clears the
// threshold, -inf otherwise. guard_in != value_in (enforced by aliasing).
struct test_body {
  test_fun fun;
  var_id guard_in;
  var_id value_in;

  friend bool operator==(const test_body& a, const test_body& b) {
    return a.fun == b.fun && a.guard_in == b.guard_in && a.value_in == b.value_in;
  }
};

struct constraint {
  var_id output;
  std::variant<bi_body, test_body> body;

  bool is_bi() const { return std::holds_alternative<bi_body>(body); }
  bool is_test() const { return std::holds_alternative<test_body>(body); }
  const bi_body& bi() const { return std::get<bi_body>(body); }
  const test_body& test() const { return std::get<test_body>(body); }

  // Inputs in declaration order (guard before value for tests).
  std::vector<var_id> input_vars() const;

  friend bool operator==(const constraint& a, const constraint& b) {
    return a.output == b.output && a.body == b.body;
  }
};

// Total map var_id -> ext_int over a fixed variable count.
class valuation {
public:
  valuation() = default;
  explicit valuation(std::size_t n, ext_int init = ext_int::minus_inf())
      : vals_(n, std::move(init)) {}

  static valuation bottom(std::size_t n) { return valuation(n); }

  std::size_t size() const { return vals_.size(); }
  const ext_int& at(var_id v) const { return vals_[v]; }
  void set(var_id v, ext_int x) { vals_[v] = std::move(x); }

  // Pointwise join with another valuation of the same size.
  void join_with(const valuation& other);
  // True if this <= other pointwise.
  bool leq(const valuation& other) const;

  friend bool operator==(const valuation& a, const valuation& b) {
    return a.vals_ == b.vals_;
  }
  friend bool operator!=(const valuation& a, const valuation& b) {
    return !(a == b);
  }

private:
  std::vector<ext_int> vals_;
};

// An ordered list of constraints over a named variable table. Immutable
// once built; use system_builder.
class constraint_system {
public:
  constraint_system() = default;
  constraint_system(std::vector<std::string> var_names,
                    std::vector<constraint> constraints);

  std::size_t n_vars() const { return var_names_.size(); }
  std::size_t size() const { return constraints_.size(); }

  const std::string& var_name(var_id v) const { return var_names_[v]; }
  const std::vector<std::string>& var_names() const { return var_names_; }
  std::optional<var_id> find_var(std::string_view name) const;

  const constraint& at(std::size_t i) const { return constraints_[i]; }
  const std::vector<constraint>& constraints() const { return constraints_; }

  bool all_bi() const;

  // Same variable table, different constraint list.
  constraint_system with_constraints(std::vector<constraint> cs) const;

private:
  std::vector<std::string> var_names_;
  std::vector<constraint> constraints_;
};

// Incremental construction with validation. Duplicate input occurrences
// within one constraint (add(Y, Y), theta(G, G), ...) are normalized away
// by introducing a fresh alias variable bound by an identity constraint
// placed just before the constraint that needed it; least solutions are
// unchanged.
class system_builder {
public:
  // Throws validation_error on duplicate or empty names.
  var_id add_var(std::string name);
  // add_var, or the existing id if already declared.
  var_id ensure_var(const std::string& name);

  void add_bi(var_id output, bi_fun f, std::vector<var_id> inputs);
  void add_test(var_id output, test_fun t, var_id guard, var_id value);

  std::size_t n_vars() const { return var_names_.size(); }

  // Validates arities and variable ids, applies normalization, and
  // yields the finished system.
  constraint_system build();

private:
  var_id fresh_alias(var_id source, std::vector<constraint>& out);

  std::vector<std::string> var_names_;
  std::vector<constraint> constraints_;
  int alias_counter_ = 0;
};

// The value f(rho(X1), ..., rho(Xk)) of c's right-hand side under rho.
ext_int eval_constraint(const constraint& c, const valuation& rho);

// rho with c's output coordinate replaced by eval_constraint(c, rho).
valuation apply_constraint(const constraint& c, const valuation& rho);

// True if every constraint's image is <= (resp. >=) the current value of
// its output variable.
bool is_solution(const constraint_system& P, const valuation& rho);
bool is_presolution(const constraint_system& P, const valuation& rho);

struct kleene_options {
  std::uint64_t max_rounds = 100000;
  // 0 disables the guard; otherwise iteration aborts once any computed
  // value exceeds this many bits (oracle protection for diverging
  // products/towers).
  std::size_t max_value_bits = 0;
  bool track_last_change = false;
};

struct kleene_result {
  valuation val;
  bool converged = false;
  std::uint64_t rounds_run = 0;
  bool bits_exceeded = false;
  // Round of the last strict raise per variable (0 = never raised).
  // Filled only when track_last_change is set.
  std::vector<std::uint64_t> last_change_round;
};

// Round-robin chaotic iteration with join: one round applies every
// constraint once in declaration order, joining into rho. Stops after an
// unchanged round (converged) or after max_rounds.
kleene_result kleene_run(const constraint_system& P, valuation rho0,
                         const kleene_options& opt);

// (final valuation, converged) with default guards off.
std::pair<valuation, bool> kleene_iterate(const constraint_system& P,
                                          valuation rho0,
                                          std::uint64_t max_rounds);

} // namespace mfp
