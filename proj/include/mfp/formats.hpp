#pragma once

#include "mfp/csys.hpp"
#include "mfp/interval.hpp"

#include <iosfwd>
#include <string_view>

namespace mfp {

// Integer constraint files: '#' comments, `var NAME...` lines first, then one
// constraint per line:
//   X >= const(K) | id(Y) | min(Y, K) | add(Y, Z) | mulp(Y, Z) | mulm(Y, Z)
//     | pow2(Y) | fact(Y) | test_geq(K; G, V) | test_gt(K; G, V)
// with K an integer, "-inf" or "+inf". Throws parse_error.
constraint_system load_ics(std::istream& in);
constraint_system load_ics_text(std::string_view text);

// Interval constraint files: same line discipline, constraint forms
//   X >= [L,U] | neg(Y) | add(Y, Z) | mul(Y, Z) | meet(Y, [L,U]).
interval_system load_ivs(std::istream& in);
interval_system load_ivs_text(std::string_view text);

}  // namespace mfp
