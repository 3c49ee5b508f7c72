#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace polycsp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two structures (or a structure and a formula) disagree on their signature.
class SignatureMismatch : public Error {
 public:
  using Error::Error;
};

/// A search or construction would exceed the configured limits.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Malformed input: bad arguments, violated preconditions, broken invariants.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Text or document parse failure; line and column are 1-based (0 if unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& what, int line, int column) {
    if (line <= 0) return what;
    return std::to_string(line) + ":" + std::to_string(column) + ": " + what;
  }

  int line_;
  int column_;
};

/// Resource limits shared by all searches and constructions.
struct Limits {
  /// Candidate assignments tried by a single backtracking search.
  std::uint64_t search_nodes = 5'000'000;
  /// Domain size of any materialized power or one-tolerant power.
  std::uint64_t power_elements = 1u << 16;
  /// Tuples of any single relation of a materialized power.
  std::uint64_t power_tuples = 5'000'000;
  /// Domain size of the indicator power |A|^t used by pp-closure.
  /// 256 gives t <= 8 on two elements and t <= 5 on three.
  std::uint64_t closure_elements = 256;
  /// Solutions collected by a single enumeration.
  std::uint64_t solutions = 1'000'000;
};

}  // namespace polycsp
