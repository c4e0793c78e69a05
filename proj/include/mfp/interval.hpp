#pragma once

#include "mfp/csys.hpp"
#include "mfp/extint.hpp"
#include "mfp/intsolve.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mfp {

// An integer interval stored as the bound pair (sup(-I), sup(I)). The empty
// interval is (-inf,-inf), top is (+inf,+inf), and a canonical non-empty pair
// (m, p) denotes {x : -m <= x <= p} and satisfies ext_add(m, p) >= 0. The
// encoding makes the lattice order componentwise and lets emptiness propagate
// through sums because -inf absorbs under ext_add.
class interval {
public:
  interval() : neg_lo_(ext_int::minus_inf()), hi_(ext_int::minus_inf()) {}

  static interval bottom() { return interval(); }
  static interval top() { return from_encoding(ext_int::plus_inf(), ext_int::plus_inf()); }

  // From the encoded pair; collapses denotation-empty pairs to bottom.
  static interval from_encoding(ext_int neg_lo, ext_int hi) {
    interval r;
    if (ext_add(neg_lo, hi) >= ext_int(0)) {
      r.neg_lo_ = std::move(neg_lo);
      r.hi_ = std::move(hi);
    }
    return r;
  }

  // From conventional bounds [lo, hi].
  static interval make(const ext_int& lo, ext_int hi) {
    return from_encoding(ext_neg(lo), std::move(hi));
  }

  const ext_int& neg_lo() const { return neg_lo_; }
  const ext_int& hi() const { return hi_; }
  ext_int lo() const { return ext_neg(neg_lo_); }

  bool is_empty() const { return neg_lo_.is_minus_inf() && hi_.is_minus_inf(); }
  bool is_top() const { return neg_lo_.is_plus_inf() && hi_.is_plus_inf(); }

  bool leq(const interval& o) const { return neg_lo_ <= o.neg_lo_ && hi_ <= o.hi_; }

  std::string to_string() const;

  friend bool operator==(const interval& a, const interval& b) {
    return a.neg_lo_ == b.neg_lo_ && a.hi_ == b.hi_;
  }
  friend bool operator!=(const interval& a, const interval& b) { return !(a == b); }

private:
  ext_int neg_lo_;
  ext_int hi_;
};

interval iv_neg(const interval& a);
interval iv_add(const interval& a, const interval& b);
// Hull of the product set (exact, including unbounded operands).
interval iv_mul(const interval& a, const interval& b);
interval iv_meet_const(const interval& a, const interval& k);
interval iv_join(const interval& a, const interval& b);

// Interval constraints: X >= -X1 | X >= K | X >= X1+X2 | X >= X1 /\ K | X >= X1*X2,
// with K a constant interval.
struct iv_constraint {
  enum class op : std::uint8_t { neg, constant, add, meet_const, mul };

  var_id output = 0;
  op which = op::constant;
  var_id in1 = 0;
  var_id in2 = 0;
  interval k;
  // Multiplications emitted by positive_mult_transform carry a certificate
  // that both operands stay within [0,+inf) in the least solution, which the
  // integer translation requires.
  bool pos_certified = false;

  std::size_t n_inputs() const {
    switch (which) {
      case op::constant: return 0;
      case op::neg:
      case op::meet_const: return 1;
      default: return 2;
    }
  }

  friend bool operator==(const iv_constraint& a, const iv_constraint& b) {
    return a.output == b.output && a.which == b.which && a.in1 == b.in1 && a.in2 == b.in2 &&
           a.k == b.k && a.pos_certified == b.pos_certified;
  }
  friend bool operator!=(const iv_constraint& a, const iv_constraint& b) { return !(a == b); }
};

class interval_system {
public:
  interval_system() = default;
  interval_system(std::vector<std::string> var_names, std::vector<iv_constraint> constraints)
      : var_names_(std::move(var_names)), constraints_(std::move(constraints)) {}

  std::size_t n_vars() const { return var_names_.size(); }
  std::size_t size() const { return constraints_.size(); }
  const std::string& var_name(var_id v) const { return var_names_.at(v); }
  const std::vector<std::string>& var_names() const { return var_names_; }
  const iv_constraint& at(std::size_t i) const { return constraints_.at(i); }
  const std::vector<iv_constraint>& constraints() const { return constraints_; }

private:
  std::vector<std::string> var_names_;
  std::vector<iv_constraint> constraints_;
};

class interval_system_builder {
public:
  var_id add_var(const std::string& name);
  var_id ensure_var(const std::string& name);

  void add_neg(var_id out, var_id in);
  void add_const(var_id out, interval k);
  void add_add(var_id out, var_id a, var_id b);
  void add_meet(var_id out, var_id in, interval k);
  void add_mul(var_id out, var_id a, var_id b, bool pos_certified = false);

  std::size_t n_vars() const { return var_names_.size(); }
  interval_system build();

private:
  std::vector<std::string> var_names_;
  std::vector<iv_constraint> constraints_;
};

class iv_valuation {
public:
  iv_valuation() = default;
  static iv_valuation bottom(std::size_t n) {
    iv_valuation v;
    v.vals_.resize(n);
    return v;
  }

  std::size_t size() const { return vals_.size(); }
  const interval& at(var_id v) const { return vals_.at(v); }
  void set(var_id v, interval x) { vals_.at(v) = std::move(x); }

  friend bool operator==(const iv_valuation& a, const iv_valuation& b) {
    return a.vals_ == b.vals_;
  }
  friend bool operator!=(const iv_valuation& a, const iv_valuation& b) { return !(a == b); }

private:
  std::vector<interval> vals_;
};

interval eval_iv_constraint(const iv_constraint& c, const iv_valuation& rho);
bool is_iv_solution(const interval_system& P, const iv_valuation& rho);

struct iv_kleene_result {
  iv_valuation val;
  bool converged = false;
  std::uint64_t rounds_run = 0;
  bool bits_exceeded = false;
};

// Round-robin joined iteration from bottom; max_value_bits > 0 aborts once an
// interval endpoint grows past that many bits (oracle safety valve).
iv_kleene_result kleene_interval(const interval_system& P, std::uint64_t max_rounds,
                                 std::size_t max_value_bits = 0);

// Rewrites every multiplication over fresh positive/negative-part variables so
// that all remaining multiplications have provably nonnegative operands; the
// least solution projected to the original variables is unchanged. Systems
// without multiplication come back structurally identical.
interval_system positive_mult_transform(const interval_system& P);

struct integer_encoding {
  constraint_system system;
  // Per interval variable: (minus-bound var, plus-bound var) in `system`.
  std::vector<std::pair<var_id, var_id>> bounds;
};

// Encodes each interval variable X as integer variables X- (= sup(-X)) and
// X+ (= sup(X)) and each constraint per the bound-pair rules; meets with a
// constant and multiplications become guarded test chains over fresh
// intermediates. Multiplications must be pos_certified.
integer_encoding translate_to_integer(const interval_system& P);

iv_valuation decode_valuation(const valuation& rho, const integer_encoding& enc,
                              std::size_t n_intervals);

// positive_mult_transform -> translate_to_integer -> solve_integer -> decode,
// projected to P's variables.
iv_valuation solve_interval(const interval_system& P, const solve_options& opt = {});

}  // namespace mfp
