#pragma once

// Text format for linear CNF, one clause per line:
//
//   line    := clause | "false"                (an empty clause)
//   clause  := literal ('|' literal)*
//   literal := ['~'] ['('] side ('=' | '!=') side [')']
//   side    := ['+' | '-'] term (('+' | '-') ['-'] term)*
//   term    := rational ['*'] var | rational | var
//   rational:= digits ['/' digits]
//   var     := [A-Za-z_][A-Za-z0-9_']*
//
// '#' starts a comment that runs to the end of the line; blank lines are
// ignored. "~ L" and "a != b" both denote a disequation. The canonical form
// printed by to_text is `c1*x1 + c2*x2 = d` with coefficients in lowest
// terms (a negative coefficient is written `+ -3*y`).

#include <cctype>
#include <string>
#include <vector>

#include "polycsp/linear_horn.hpp"

namespace polycsp {

namespace detail {

class CnfLineParser {
 public:
  CnfLineParser(const std::string& line, int line_no) : s_(line), line_(line_no) {}

  LinearClause clause() {
    LinearClause out;
    skip();
    if (keyword("false")) {
      skip();
      if (pos_ != s_.size()) fail("unexpected text after 'false'");
      return out;
    }
    out.push_back(literal());
    skip();
    while (pos_ < s_.size() && s_[pos_] == '|') {
      ++pos_;
      out.push_back(literal());
      skip();
    }
    if (pos_ != s_.size()) fail("expected '|' or end of line");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_, static_cast<int>(pos_) + 1);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool keyword(const std::string& k) {
    if (s_.compare(pos_, k.size(), k) != 0) return false;
    const std::size_t end = pos_ + k.size();
    if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) return false;
    pos_ = end;
    return true;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  LinearLiteral literal() {
    bool negated = accept('~');
    const bool paren = accept('(');
    std::map<std::string, Rational> coeffs;
    Rational constant = 0;
    side(coeffs, constant, 1);
    skip();
    if (s_.compare(pos_, 2, "!=") == 0) {
      pos_ += 2;
      negated = !negated;
    } else if (pos_ < s_.size() && s_[pos_] == '=') {
      ++pos_;
    } else {
      fail("expected '=' or '!='");
    }
    side(coeffs, constant, -1);
    if (paren && !accept(')')) fail("expected ')'");
    // lhs - rhs = 0  <=>  sum c x = -constant
    return LinearLiteral(std::move(coeffs), -constant, negated ? Polarity::neq : Polarity::eq);
  }

  void side(std::map<std::string, Rational>& coeffs, Rational& constant, int sign) {
    skip();
    int s = 1;
    if (accept('-')) s = -1;
    else accept('+');
    term(coeffs, constant, sign * s);
    while (true) {
      skip();
      if (accept('+')) s = 1;
      else if (accept('-')) s = -1;
      else break;
      if (accept('-')) s = -s;
      term(coeffs, constant, sign * s);
    }
  }

  void term(std::map<std::string, Rational>& coeffs, Rational& constant, int sign) {
    skip();
    Rational c = 1;
    bool has_number = false;
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '/') {
        ++pos_;
        const std::size_t den = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ == den) fail("expected denominator");
      }
      try {
        c = parse_rational(s_.substr(start, pos_ - start));
      } catch (const InvalidInput& e) {
        pos_ = start;
        fail(e.what());
      }
      has_number = true;
      accept('*');
      skip();
    }
    if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '\''))
        ++pos_;
      coeffs[s_.substr(start, pos_ - start)] += sign * c;
      return;
    }
    if (!has_number) fail("expected a number or variable");
    constant += sign * c;
  }

  const std::string& s_;
  int line_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline LinearCnf parse_cnf(const std::string& text) {
  std::vector<LinearClause> clauses;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    ++line_no;
    std::string line = text.substr(start, end - start);
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos)
      clauses.push_back(detail::CnfLineParser(line, line_no).clause());
    start = end + 1;
  }
  return LinearCnf(std::move(clauses));
}

inline std::string to_text(const LinearClause& c) {
  if (c.empty()) return "false";
  std::string out;
  for (const auto& l : c) out += (out.empty() ? "" : " | ") + l.to_string();
  return out;
}

inline std::string to_text(const LinearCnf& f) {
  std::string out;
  for (const auto& c : f.clauses()) out += to_text(c) + "\n";
  return out;
}

inline std::string to_text(const RationalPoint& p) {
  std::string out = "(";
  for (const auto& [x, v] : p) out += (out.size() > 1 ? ", " : "") + x + "=" + v.str();
  return out + ")";
}

}  // namespace polycsp
