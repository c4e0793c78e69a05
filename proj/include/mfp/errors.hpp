#pragma once

#include <stdexcept>
#include <string>

namespace mfp {

// Base class for all errors raised by the library.
class error : public std::runtime_error {
public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed textual input (.ics, .ivs, .wl). Line/column are 1-based;
// column 0 means "whole line".
class parse_error : public error {
public:
  parse_error(std::string msg, int line, int col = 0)
      : error(format(msg, line, col)), line_(line), col_(col) {}

  int line() const { return line_; }
  int col() const { return col_; }

private:
  static std::string format(const std::string& msg, int line, int col) {
    if (line <= 0) return msg;
    std::string s = "line " + std::to_string(line);
    if (col > 0) s += ", col " + std::to_string(col);
    s += ": " + msg;
    return s;
  }

  int line_;
  int col_;
};

// Structurally invalid constraint system or misuse of an operation's
// precondition (undeclared variable, arity mismatch, non-cyclic input to
// the cyclic solver, ...).
class validation_error : public error {
public:
  using error::error;
};

// Exact computation refused because a value would be too large to
// represent (pow2/factorial input caps). Never raised for results that
// fit in memory.
class limit_error : public error {
public:
  using error::error;
};

} // namespace mfp
