#include "mfp/extint.hpp"

#include "mfp/errors.hpp"

#include <cassert>
#include <cctype>

namespace mfp {

std::string ext_int::to_string() const {
  switch (kind_) {
    case kind::minus_inf: return "-inf";
    case kind::plus_inf: return "+inf";
    case kind::finite: return value_.str();
  }
  return {};
}

std::optional<ext_int> ext_int::parse(std::string_view text) {
  if (text == "-inf") return minus_inf();
  if (text == "+inf") return plus_inf();
  if (text.empty()) return std::nullopt;
  std::size_t i = text[0] == '-' ? 1 : 0;
  if (i == text.size()) return std::nullopt;
  for (std::size_t j = i; j < text.size(); ++j)
    if (!std::isdigit(static_cast<unsigned char>(text[j]))) return std::nullopt;
  return ext_int(bigint(std::string(text)));
}

ext_int ext_max(const ext_int& a, const ext_int& b) { return a < b ? b : a; }
ext_int ext_min(const ext_int& a, const ext_int& b) { return b < a ? b : a; }

ext_int ext_add(const ext_int& a, const ext_int& b) {
  // -inf absorbs, so (+inf) + (-inf) = -inf.
  if (a.is_minus_inf() || b.is_minus_inf()) return ext_int::minus_inf();
  if (a.is_plus_inf() || b.is_plus_inf()) return ext_int::plus_inf();
  return ext_int(a.finite_value() + b.finite_value());
}

ext_int ext_mul(const ext_int& a, const ext_int& b) {
  // Zero absorbs both infinities.
  if (a.is_zero() || b.is_zero()) return ext_int(0);
  if (a.is_finite() && b.is_finite())
    return ext_int(a.finite_value() * b.finite_value());
  const bool a_neg = a.is_minus_inf() || (a.is_finite() && a.finite_value() < 0);
  const bool b_neg = b.is_minus_inf() || (b.is_finite() && b.finite_value() < 0);
  return (a_neg == b_neg) ? ext_int::plus_inf() : ext_int::minus_inf();
}

ext_int ext_neg(const ext_int& a) {
  if (a.is_minus_inf()) return ext_int::plus_inf();
  if (a.is_plus_inf()) return ext_int::minus_inf();
  return ext_int(-a.finite_value());
}

std::size_t bit_length(const ext_int& a) {
  if (!a.is_finite() || a.is_zero()) return 0;
  bigint m = boost::multiprecision::abs(a.finite_value());
  return boost::multiprecision::msb(m) + 1;
}

namespace {

ext_int eval_pow2(const ext_int& x) {
  if (x.is_plus_inf()) return ext_int::plus_inf();
  if (x.is_minus_inf() || x.finite_value() <= 0) return ext_int(1);
  if (x.finite_value() > pow2_max_exponent)
    throw limit_error("pow2 argument " + x.to_string() +
                      " exceeds the representable-result cap");
  bigint r = bigint(1) << static_cast<unsigned>(x.finite_value());
  return ext_int(std::move(r));
}

ext_int eval_factorial(const ext_int& x) {
  if (x.is_plus_inf()) return ext_int::plus_inf();
  if (x.is_minus_inf() || x.finite_value() <= 1) return ext_int(1);
  if (x.finite_value() > factorial_max_argument)
    throw limit_error("factorial argument " + x.to_string() +
                      " exceeds the representable-result cap");
  const long long n = x.finite_value().convert_to<long long>();
  bigint r = 1;
  for (long long k = 2; k <= n; ++k) r *= k;
  return ext_int(std::move(r));
}

bool both_geq_zero(const ext_int& x, const ext_int& y) {
  return x >= ext_int(0) && y >= ext_int(0);
}

bool both_lt_zero(const ext_int& x, const ext_int& y) {
  return x < ext_int(0) && y < ext_int(0);
}

} // namespace

ext_int apply_bifun(const bi_fun& f, std::span<const ext_int> args) {
  assert(static_cast<int>(args.size()) == f.arity());
  switch (f.which()) {
    case bi_fun::kind::constant:
      return f.param();
    case bi_fun::kind::identity:
      return args[0];
    case bi_fun::kind::guarded_min:
      return ext_min(args[0], f.param());
    case bi_fun::kind::add:
      return ext_add(args[0], args[1]);
    case bi_fun::kind::mul_plus:
      return both_geq_zero(args[0], args[1]) ? ext_mul(args[0], args[1])
                                             : ext_int(0);
    case bi_fun::kind::mul_minus:
      return both_lt_zero(args[0], args[1]) ? ext_neg(ext_mul(args[0], args[1]))
                                            : ext_int(0);
    case bi_fun::kind::pow2:
      return eval_pow2(args[0]);
    case bi_fun::kind::factorial:
      return eval_factorial(args[0]);
  }
  assert(false && "unreachable");
  return ext_int(0);
}

std::pair<ext_int, ext_int> fun_bounds(const bi_fun& f) {
  const ext_int bot = ext_int::minus_inf();
  const ext_int top = ext_int::plus_inf();
  switch (f.which()) {
    case bi_fun::kind::constant:
      return {f.param(), f.param()};
    case bi_fun::kind::identity:
      return {bot, top};
    case bi_fun::kind::guarded_min:
      return {bot, f.param()};
    case bi_fun::kind::add:
      return {bot, top};
    case bi_fun::kind::mul_plus:
      return {ext_int(0), top};
    case bi_fun::kind::mul_minus:
      // mul_minus(-inf, -inf) = -((-inf)*(-inf)) = -inf; at top both
      // arguments are >= 0, so the function is pinned to 0.
      return {bot, ext_int(0)};
    case bi_fun::kind::pow2:
      return {ext_int(1), top};
    case bi_fun::kind::factorial:
      return {ext_int(1), top};
  }
  assert(false && "unreachable");
  return {bot, top};
}

ext_int apply_test(const test_fun& t, const ext_int& guard, const ext_int& value) {
  const bool pass = t.which == test_fun::kind::geq ? guard >= t.threshold
                                                   : guard > t.threshold;
  return pass ? value : ext_int::minus_inf();
}

} // namespace mfp
