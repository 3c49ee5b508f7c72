#pragma once

// Sentence text grammar (whitespace insignificant, '#' starts a line comment):
//
//   formula     := disjunction
//   disjunction := conjunction ( '|' conjunction )*
//   conjunction := unary ( '&' unary )*
//   unary       := 'exists' IDENT+ '.' formula
//                | '(' formula ')'
//                | 'false' | 'true'
//                | IDENT '(' term ( ',' term )* ')'
//                | term '=' term
//   term        := IDENT
//   IDENT       := [A-Za-z_][A-Za-z0-9_']*   (not a keyword)
//
// 'exists' extends as far to the right as possible. An identifier that names
// a constant symbol and is not bound by an enclosing quantifier is read as a
// constant. 'true' is the empty conjunction. Universal quantifiers, negation
// and implication are rejected.

#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "polycsp/formula.hpp"

namespace polycsp {

namespace detail {

class FormulaParser {
 public:
  FormulaParser(const std::string& text, const std::set<std::string>& constants)
      : text_(text), constants_(constants) {}

  Formula parse() {
    next();
    Formula f = disjunction();
    if (tok_.kind != Tok::end) fail("unexpected '" + tok_.text + "'");
    return f;
  }

 private:
  enum class Tok { ident, lparen, rparen, comma, dot, amp, bar, eq, end };
  struct Token {
    Tok kind = Tok::end;
    std::string text;
    int line = 1, col = 1;
  };

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, tok_.line, tok_.col); }

  void next() {
    // skip whitespace and comments
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= text_.size()) {
      tok_ = {Tok::end, "end of input", line_, col_};
      return;
    }
    const char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '\'')) {
        id += text_[pos_];
        advance();
      }
      tok_.kind = Tok::ident;
      tok_.text = id;
      if (id == "forall" || id == "all") fail("universal quantifiers are not supported");
      if (id == "not") fail("negation is not supported");
      return;
    }
    auto single = [&](Tok k) {
      tok_.kind = k;
      tok_.text = std::string(1, c);
      advance();
    };
    switch (c) {
      case '(':
        return single(Tok::lparen);
      case ')':
        return single(Tok::rparen);
      case ',':
        return single(Tok::comma);
      case '.':
        return single(Tok::dot);
      case '&':
        return single(Tok::amp);
      case '|':
        return single(Tok::bar);
      case '=':
        return single(Tok::eq);
      case '~':
      case '!':
      case '-':
        tok_.text = std::string(1, c);
        fail(c == '-' ? "implication is not supported" : "negation is not supported");
      default:
        tok_.text = std::string(1, c);
        fail("unexpected character '" + tok_.text + "'");
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void expect(Tok k, const char* what) {
    if (tok_.kind != k) fail(std::string("expected ") + what + ", found '" + tok_.text + "'");
    next();
  }

  static bool keyword(const std::string& s) { return s == "exists" || s == "false" || s == "true"; }

  Formula disjunction() {
    std::vector<Formula> parts{conjunction()};
    while (tok_.kind == Tok::bar) {
      next();
      parts.push_back(conjunction());
    }
    return parts.size() == 1 ? std::move(parts.front()) : Formula::disjunction(std::move(parts));
  }

  Formula conjunction() {
    std::vector<Formula> parts{unary()};
    while (tok_.kind == Tok::amp) {
      next();
      parts.push_back(unary());
    }
    return parts.size() == 1 ? std::move(parts.front()) : Formula::conjunction(std::move(parts));
  }

  Term term() {
    if (tok_.kind != Tok::ident || keyword(tok_.text)) fail("expected a variable, found '" + tok_.text + "'");
    std::string name = tok_.text;
    next();
    if (constants_.count(name) && !bound_.count(name)) return Term::constant(std::move(name));
    return Term::var(std::move(name));
  }

  Formula unary() {
    if (tok_.kind == Tok::lparen) {
      next();
      Formula f = disjunction();
      expect(Tok::rparen, "')'");
      return f;
    }
    if (tok_.kind != Tok::ident) fail("expected a formula, found '" + tok_.text + "'");
    if (tok_.text == "false") {
      next();
      return Formula::falsum();
    }
    if (tok_.text == "true") {
      next();
      return Formula::conjunction({});
    }
    if (tok_.text == "exists") {
      next();
      std::vector<std::string> vars;
      while (tok_.kind == Tok::ident && !keyword(tok_.text)) {
        vars.push_back(tok_.text);
        next();
      }
      if (vars.empty()) fail("expected variables after 'exists'");
      expect(Tok::dot, "'.'");
      for (const auto& v : vars) ++bound_[v];
      Formula body = disjunction();
      for (const auto& v : vars)
        if (--bound_[v] == 0) bound_.erase(v);
      return Formula::exists(std::move(vars), std::move(body));
    }
    // atom or equality
    const Token start = tok_;
    std::string name = tok_.text;
    next();
    if (tok_.kind == Tok::lparen) {
      next();
      std::vector<Term> args{term()};
      while (tok_.kind == Tok::comma) {
        next();
        args.push_back(term());
      }
      expect(Tok::rparen, "')'");
      return Formula::atom(std::move(name), std::move(args));
    }
    if (tok_.kind == Tok::eq) {
      next();
      Term lhs = (constants_.count(name) && !bound_.count(name)) ? Term::constant(name) : Term::var(name);
      return Formula::equality(std::move(lhs), term());
    }
    tok_ = start;
    fail("expected '(' or '=' after '" + name + "'");
  }

  const std::string& text_;
  const std::set<std::string>& constants_;
  std::map<std::string, int> bound_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

}  // namespace detail

/// Parses sentence text; identifiers in `constants` denote constant symbols
/// wherever they are not bound by a quantifier.
inline Formula parse_formula(const std::string& text, const std::set<std::string>& constants = {}) {
  return detail::FormulaParser(text, constants).parse();
}

inline Formula parse_formula(const std::string& text, const Signature& sig) {
  std::set<std::string> constants(sig.constants().begin(), sig.constants().end());
  Formula f = parse_formula(text, constants);
  check_symbols(f, sig);
  return f;
}

}  // namespace polycsp
