#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace mfp {

using bigint = boost::multiprecision::cpp_int;

// An integer extended with -inf and +inf, totally ordered by
// -inf < ... < -1 < 0 < 1 < ... < +inf. Finite values have unbounded
// precision.
//
// Arithmetic follows the usual extension rules:
//   x + (-inf) = -inf           for every x (so (+inf) + (-inf) = -inf)
//   x + (+inf) = +inf           for every x > -inf
//   x * 0      = 0              for every x, including both infinities
//   x * (+inf) = +inf, x * (-inf) = -inf   for x > 0
//   x * (+inf) = -inf, x * (-inf) = +inf   for x < 0
class ext_int {
public:
  ext_int() : kind_(kind::finite), value_(0) {}
  ext_int(long long v) : kind_(kind::finite), value_(v) {}
  explicit ext_int(bigint v) : kind_(kind::finite), value_(std::move(v)) {}

  static ext_int minus_inf() { return ext_int(kind::minus_inf); }
  static ext_int plus_inf() { return ext_int(kind::plus_inf); }

  bool is_minus_inf() const { return kind_ == kind::minus_inf; }
  bool is_plus_inf() const { return kind_ == kind::plus_inf; }
  bool is_finite() const { return kind_ == kind::finite; }
  bool is_zero() const { return is_finite() && value_ == 0; }

  // Defined only for finite values.
  const bigint& finite_value() const { return value_; }

  friend bool operator==(const ext_int& a, const ext_int& b) {
    if (a.kind_ != b.kind_) return false;
    return a.kind_ != kind::finite || a.value_ == b.value_;
  }
  friend bool operator!=(const ext_int& a, const ext_int& b) { return !(a == b); }
  friend bool operator<(const ext_int& a, const ext_int& b) {
    if (a.kind_ != b.kind_) return rank(a.kind_) < rank(b.kind_);
    return a.kind_ == kind::finite && a.value_ < b.value_;
  }
  friend bool operator>(const ext_int& a, const ext_int& b) { return b < a; }
  friend bool operator<=(const ext_int& a, const ext_int& b) { return !(b < a); }
  friend bool operator>=(const ext_int& a, const ext_int& b) { return !(a < b); }

  // "-inf", "+inf", or the decimal rendering of the finite value.
  std::string to_string() const;

  // Inverse of to_string; rejects anything else.
  static std::optional<ext_int> parse(std::string_view text);

private:
  enum class kind : std::uint8_t { minus_inf, finite, plus_inf };

  explicit ext_int(kind k) : kind_(k), value_(0) {}

  static int rank(kind k) { return static_cast<int>(k); }

  kind kind_;
  bigint value_;
};

ext_int ext_max(const ext_int& a, const ext_int& b);
ext_int ext_min(const ext_int& a, const ext_int& b);
ext_int ext_add(const ext_int& a, const ext_int& b);
ext_int ext_mul(const ext_int& a, const ext_int& b);
ext_int ext_neg(const ext_int& a);

// Number of bits in the magnitude of a finite value (0 for zero and for
// both infinities). Used by the solver's growth watchdog.
std::size_t bit_length(const ext_int& a);

// Input caps for the two functions whose results grow faster than any
// fixed multiple of their input size. Beyond these, the exact result
// would not be representable in memory; apply_bifun raises limit_error.
inline constexpr long long pow2_max_exponent = 1'000'000;
inline constexpr long long factorial_max_argument = 50'000;

// The catalog of bounded-increasing functions. Every one is monotonic,
// and strictly increasing on the interior of its range: whenever
// x1 < x2, f(bot) < f(x1) and f(x2) < f(top) imply f(x1) < f(x2).
class bi_fun {
public:
  enum class kind : std::uint8_t {
    constant,    // () -> b
    identity,    // x -> x
    guarded_min, // x -> min(x, b)
    add,         // (x, y) -> x + y
    mul_plus,    // (x, y) -> x * y if x, y >= 0, else 0
    mul_minus,   // (x, y) -> -(x * y) if x, y < 0, else 0
    pow2,        // x -> 2^max(x, 0)
    factorial    // x -> max(x, 1)!
  };

  static bi_fun constant(ext_int b) { return bi_fun(kind::constant, std::move(b)); }
  static bi_fun identity() { return bi_fun(kind::identity); }
  static bi_fun guarded_min(ext_int b) { return bi_fun(kind::guarded_min, std::move(b)); }
  static bi_fun add() { return bi_fun(kind::add); }
  static bi_fun mul_plus() { return bi_fun(kind::mul_plus); }
  static bi_fun mul_minus() { return bi_fun(kind::mul_minus); }
  static bi_fun pow2() { return bi_fun(kind::pow2); }
  static bi_fun factorial() { return bi_fun(kind::factorial); }

  kind which() const { return kind_; }
  const ext_int& param() const { return param_; }

  int arity() const {
    switch (kind_) {
      case kind::constant: return 0;
      case kind::add:
      case kind::mul_plus:
      case kind::mul_minus: return 2;
      default: return 1;
    }
  }

  friend bool operator==(const bi_fun& a, const bi_fun& b) {
    if (a.kind_ != b.kind_) return false;
    if (a.kind_ == kind::constant || a.kind_ == kind::guarded_min)
      return a.param_ == b.param_;
    return true;
  }
  friend bool operator!=(const bi_fun& a, const bi_fun& b) { return !(a == b); }

private:
  explicit bi_fun(kind k, ext_int p = ext_int(0)) : kind_(k), param_(std::move(p)) {}

  kind kind_;
  ext_int param_;
};

// Evaluates f on args; args.size() must equal f.arity().
ext_int apply_bifun(const bi_fun& f, std::span<const ext_int> args);

// (f applied to all-bot, f applied to all-top): the two values outside of
// which f saturates.
std::pair<ext_int, ext_int> fun_bounds(const bi_fun& f);

// Guarded pass-through: yields `value` when `guard` clears the threshold,
// -inf otherwise. Monotonic in both arguments but not bounded-increasing,
// which is why it is kept apart from the bi_fun catalog.
struct test_fun {
  enum class kind : std::uint8_t { geq, gt };

  kind which;
  ext_int threshold;

  static test_fun geq(ext_int b) { return {kind::geq, std::move(b)}; }
  static test_fun gt(ext_int b) { return {kind::gt, std::move(b)}; }

  friend bool operator==(const test_fun& a, const test_fun& b) {
    return a.which == b.which && a.threshold == b.threshold;
  }
  friend bool operator!=(const test_fun& a, const test_fun& b) { return !(a == b); }
};

ext_int apply_test(const test_fun& t, const ext_int& guard, const ext_int& value);

} // namespace mfp
