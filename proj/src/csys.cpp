#include "mfp/csys.hpp"

#include "mfp/errors.hpp"

#include <algorithm>
#include <cassert>

namespace mfp {

std::vector<var_id> constraint::input_vars() const {
  if (is_bi()) return bi().inputs;
  return {test().guard_in, test().value_in};
}

void valuation::join_with(const valuation& other) {
  assert(vals_.size() == other.vals_.size());
  for (std::size_t i = 0; i < vals_.size(); ++i)
    if (vals_[i] < other.vals_[i]) vals_[i] = other.vals_[i];
}

bool valuation::leq(const valuation& other) const {
  assert(vals_.size() == other.vals_.size());
  for (std::size_t i = 0; i < vals_.size(); ++i)
    if (other.vals_[i] < vals_[i]) return false;
  return true;
}

constraint_system::constraint_system(std::vector<std::string> var_names,
                                     std::vector<constraint> constraints)
    : var_names_(std::move(var_names)), constraints_(std::move(constraints)) {}

std::optional<var_id> constraint_system::find_var(std::string_view name) const {
  for (std::size_t i = 0; i < var_names_.size(); ++i)
    if (var_names_[i] == name) return static_cast<var_id>(i);
  return std::nullopt;
}

bool constraint_system::all_bi() const {
  return std::all_of(constraints_.begin(), constraints_.end(),
                     [](const constraint& c) { return c.is_bi(); });
}

constraint_system constraint_system::with_constraints(
    std::vector<constraint> cs) const {
  return constraint_system(var_names_, std::move(cs));
}

var_id system_builder::add_var(std::string name) {
  if (name.empty()) throw validation_error("empty variable name");
  for (const auto& n : var_names_)
    if (n == name) throw validation_error("duplicate variable name: " + name);
  var_names_.push_back(std::move(name));
  return static_cast<var_id>(var_names_.size() - 1);
}

var_id system_builder::ensure_var(const std::string& name) {
  for (std::size_t i = 0; i < var_names_.size(); ++i)
    if (var_names_[i] == name) return static_cast<var_id>(i);
  return add_var(name);
}

void system_builder::add_bi(var_id output, bi_fun f, std::vector<var_id> inputs) {
  constraints_.push_back(constraint{output, bi_body{std::move(f), std::move(inputs)}});
}

void system_builder::add_test(var_id output, test_fun t, var_id guard, var_id value) {
  constraints_.push_back(constraint{output, test_body{std::move(t), guard, value}});
}

var_id system_builder::fresh_alias(var_id source, std::vector<constraint>& out) {
  std::string name = "$a" + std::to_string(alias_counter_++);
  var_names_.push_back(std::move(name));
  const auto alias = static_cast<var_id>(var_names_.size() - 1);
  out.push_back(constraint{alias, bi_body{bi_fun::identity(), {source}}});
  return alias;
}

constraint_system system_builder::build() {
  const auto check_var = [&](var_id v) {
    if (v >= var_names_.size())
      throw validation_error("constraint references unknown variable id " +
                             std::to_string(v));
  };

  std::vector<constraint> normalized;
  normalized.reserve(constraints_.size());
  for (const auto& c : constraints_) {
    check_var(c.output);
    if (c.is_bi()) {
      const auto& b = c.bi();
      if (static_cast<int>(b.inputs.size()) != b.fun.arity())
        throw validation_error("arity mismatch: function expects " +
                               std::to_string(b.fun.arity()) + " inputs, got " +
                               std::to_string(b.inputs.size()));
      for (var_id v : b.inputs) check_var(v);
      std::vector<var_id> inputs = b.inputs;
      if (inputs.size() == 2 && inputs[0] == inputs[1])
        inputs[1] = fresh_alias(inputs[1], normalized);
      normalized.push_back(constraint{c.output, bi_body{b.fun, std::move(inputs)}});
    } else {
      const auto& t = c.test();
      check_var(t.guard_in);
      check_var(t.value_in);
      var_id value = t.value_in;
      if (t.guard_in == value) value = fresh_alias(value, normalized);
      normalized.push_back(constraint{c.output, test_body{t.fun, t.guard_in, value}});
    }
  }
  return constraint_system(std::move(var_names_), std::move(normalized));
}

ext_int eval_constraint(const constraint& c, const valuation& rho) {
  if (c.is_bi()) {
    const auto& b = c.bi();
    ext_int args[2];
    const int n = b.fun.arity();
    for (int i = 0; i < n; ++i) args[i] = rho.at(b.inputs[i]);
    return apply_bifun(b.fun, std::span<const ext_int>(args, n));
  }
  const auto& t = c.test();
  return apply_test(t.fun, rho.at(t.guard_in), rho.at(t.value_in));
}

valuation apply_constraint(const constraint& c, const valuation& rho) {
  valuation out = rho;
  out.set(c.output, eval_constraint(c, rho));
  return out;
}

bool is_solution(const constraint_system& P, const valuation& rho) {
  for (const auto& c : P.constraints())
    if (rho.at(c.output) < eval_constraint(c, rho)) return false;
  return true;
}

bool is_presolution(const constraint_system& P, const valuation& rho) {
  for (const auto& c : P.constraints())
    if (eval_constraint(c, rho) < rho.at(c.output)) return false;
  return true;
}

kleene_result kleene_run(const constraint_system& P, valuation rho0,
                         const kleene_options& opt) {
  kleene_result r;
  r.val = std::move(rho0);
  if (opt.track_last_change) r.last_change_round.assign(P.n_vars(), 0);

  // A constraint whose inputs have not changed since its last evaluation
  // yields the same image, which did not raise the output then and cannot
  // now, so it is safe to skip.  Raises mark the readers of the raised
  // variable dirty: later constraints in the current pass (they would see
  // the new value this round), earlier ones for the next round.  The raise
  // sequence is exactly the one full re-evaluation would produce.
  std::vector<std::vector<std::uint32_t>> readers(P.n_vars());
  for (std::uint32_t ci = 0; ci < P.size(); ++ci)
    for (var_id v : P.at(ci).input_vars()) readers[v].push_back(ci);
  std::vector<char> dirty(P.size(), 1);
  std::vector<char> next_dirty(P.size(), 0);

  for (std::uint64_t round = 1; round <= opt.max_rounds; ++round) {
    bool changed = false;
    for (std::uint32_t ci = 0; ci < P.size(); ++ci) {
      if (!dirty[ci]) continue;
      dirty[ci] = 0;
      const constraint& c = P.at(ci);
      ext_int img = eval_constraint(c, r.val);
      if (r.val.at(c.output) < img) {
        if (opt.max_value_bits && bit_length(img) > opt.max_value_bits) {
          r.rounds_run = round;
          r.bits_exceeded = true;
          return r;
        }
        r.val.set(c.output, std::move(img));
        if (opt.track_last_change) r.last_change_round[c.output] = round;
        changed = true;
        for (std::uint32_t rd : readers[c.output]) {
          if (rd > ci)
            dirty[rd] = 1;
          else
            next_dirty[rd] = 1;
        }
      }
    }
    r.rounds_run = round;
    if (!changed) {
      r.converged = true;
      return r;
    }
    dirty.swap(next_dirty);
    std::fill(next_dirty.begin(), next_dirty.end(), 0);
  }
  return r;
}

std::pair<valuation, bool> kleene_iterate(const constraint_system& P,
                                          valuation rho0,
                                          std::uint64_t max_rounds) {
  kleene_result r = kleene_run(P, std::move(rho0), {.max_rounds = max_rounds});
  return {std::move(r.val), r.converged};
}

} // namespace mfp
