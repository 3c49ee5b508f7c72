#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "polycsp/error.hpp"
#include "polycsp/structure.hpp"

namespace polycsp {

struct Term {
  enum class Kind { variable, constant };
  Kind kind = Kind::variable;
  std::string name;

  static Term var(std::string name) { return {Kind::variable, std::move(name)}; }
  static Term constant(std::string name) { return {Kind::constant, std::move(name)}; }
  bool is_variable() const { return kind == Kind::variable; }

  auto operator<=>(const Term&) const = default;
};

enum class Fragment { pp, ep };

/// Existential-positive formula: atoms, equalities, false, conjunction,
/// disjunction and existential quantification. A formula without
/// disjunction is primitive positive (pp).
class Formula {
 public:
  enum class Kind { falsum, atom, equality, conjunction, disjunction, exists };

  Formula() = default;

  static Formula falsum() { return Formula(Kind::falsum); }

  static Formula atom(std::string relation, std::vector<Term> args) {
    Formula f(Kind::atom);
    f.relation_ = std::move(relation);
    f.terms_ = std::move(args);
    return f;
  }

  static Formula equality(Term lhs, Term rhs) {
    Formula f(Kind::equality);
    f.terms_ = {std::move(lhs), std::move(rhs)};
    return f;
  }

  static Formula conjunction(std::vector<Formula> parts) {
    Formula f(Kind::conjunction);
    f.children_ = std::move(parts);
    return f;
  }

  static Formula disjunction(std::vector<Formula> parts) {
    Formula f(Kind::disjunction);
    f.children_ = std::move(parts);
    return f;
  }

  static Formula exists(std::vector<std::string> vars, Formula body) {
    if (vars.empty()) return body;
    Formula f(Kind::exists);
    f.bound_ = std::move(vars);
    f.children_.push_back(std::move(body));
    return f;
  }

  Kind kind() const { return kind_; }
  const std::string& relation() const { return relation_; }
  const std::vector<Term>& terms() const { return terms_; }
  const std::vector<Formula>& children() const { return children_; }
  const Formula& body() const { return children_.at(0); }
  const std::vector<std::string>& bound() const { return bound_; }

  bool is_atomic() const { return kind_ == Kind::atom || kind_ == Kind::equality; }

  Fragment fragment() const {
    if (kind_ == Kind::disjunction) return Fragment::ep;
    for (const auto& c : children_)
      if (c.fragment() == Fragment::ep) return Fragment::ep;
    return Fragment::pp;
  }
  bool is_pp() const { return fragment() == Fragment::pp; }

  std::set<std::string> free_variables() const {
    std::set<std::string> out;
    collect_free(out, {});
    return out;
  }
  bool is_sentence() const { return free_variables().empty(); }

  /// Every variable name occurring anywhere, bound or free.
  void collect_names(std::set<std::string>& out) const {
    for (const auto& t : terms_)
      if (t.is_variable()) out.insert(t.name);
    for (const auto& v : bound_) out.insert(v);
    for (const auto& c : children_) c.collect_names(out);
  }

  std::string to_string() const {
    switch (kind_) {
      case Kind::falsum:
        return "false";
      case Kind::atom: {
        std::string s = relation_ + "(";
        for (std::size_t i = 0; i < terms_.size(); ++i) s += (i ? "," : "") + terms_[i].name;
        return s + ")";
      }
      case Kind::equality:
        return terms_[0].name + "=" + terms_[1].name;
      case Kind::conjunction:
      case Kind::disjunction: {
        if (children_.empty()) return kind_ == Kind::conjunction ? "true" : "false";
        std::string s;
        const char* sep = kind_ == Kind::conjunction ? " & " : " | ";
        for (std::size_t i = 0; i < children_.size(); ++i) {
          const auto& c = children_[i];
          const bool wrap = c.kind_ == Kind::exists || c.kind_ == Kind::disjunction ||
                            (c.kind_ == Kind::conjunction && !c.children_.empty());
          if (i) s += sep;
          s += wrap ? "(" + c.to_string() + ")" : c.to_string();
        }
        return s;
      }
      case Kind::exists: {
        std::string s = "exists";
        for (const auto& v : bound_) s += " " + v;
        return s + " . " + body().to_string();
      }
    }
    return {};
  }

  bool operator==(const Formula&) const = default;

 private:
  explicit Formula(Kind k) : kind_(k) {}

  void collect_free(std::set<std::string>& out, const std::set<std::string>& scope) const {
    for (const auto& t : terms_)
      if (t.is_variable() && !scope.count(t.name)) out.insert(t.name);
    if (kind_ == Kind::exists) {
      std::set<std::string> inner = scope;
      inner.insert(bound_.begin(), bound_.end());
      body().collect_free(out, inner);
      return;
    }
    for (const auto& c : children_) c.collect_free(out, scope);
  }

  Kind kind_ = Kind::falsum;
  std::string relation_;
  std::vector<Term> terms_;
  std::vector<Formula> children_;
  std::vector<std::string> bound_;
};

/// Checks every relation and constant symbol against `sig`.
inline void check_symbols(const Formula& f, const Signature& sig) {
  for (const auto& t : f.terms())
    if (!t.is_variable() && !sig.find_constant(t.name))
      throw InvalidInput("unknown constant symbol '" + t.name + "'");
  if (f.kind() == Formula::Kind::atom) {
    auto r = sig.find_relation(f.relation());
    if (!r) throw InvalidInput("unknown relation symbol '" + f.relation() + "'");
    if (sig.relations()[*r].arity != static_cast<int>(f.terms().size()))
      throw InvalidInput("relation '" + f.relation() + "' has arity " + std::to_string(sig.relations()[*r].arity) +
                         " but is applied to " + std::to_string(f.terms().size()) + " terms");
  }
  for (const auto& c : f.children()) check_symbols(c, sig);
}

/// Replaces free occurrences of variables according to `rename`.
inline Formula substitute(const Formula& f, const std::map<std::string, std::string>& rename) {
  using K = Formula::Kind;
  auto term = [&](const Term& t) {
    if (!t.is_variable()) return t;
    auto it = rename.find(t.name);
    return it == rename.end() ? t : Term::var(it->second);
  };
  switch (f.kind()) {
    case K::falsum:
      return f;
    case K::atom: {
      std::vector<Term> args;
      for (const auto& t : f.terms()) args.push_back(term(t));
      return Formula::atom(f.relation(), std::move(args));
    }
    case K::equality:
      return Formula::equality(term(f.terms()[0]), term(f.terms()[1]));
    case K::conjunction:
    case K::disjunction: {
      std::vector<Formula> parts;
      for (const auto& c : f.children()) parts.push_back(substitute(c, rename));
      return f.kind() == K::conjunction ? Formula::conjunction(std::move(parts))
                                        : Formula::disjunction(std::move(parts));
    }
    case K::exists: {
      auto inner = rename;
      for (const auto& v : f.bound()) inner.erase(v);
      return Formula::exists(f.bound(), substitute(f.body(), inner));
    }
  }
  return f;
}

/// Produces names that do not clash with anything registered so far.
class NameSupply {
 public:
  explicit NameSupply(std::set<std::string> taken = {}) : taken_(std::move(taken)) {}

  void reserve(const std::string& name) { taken_.insert(name); }

  /// `base` itself when unused, otherwise base_1, base_2, ...
  std::string fresh(const std::string& base) {
    if (taken_.insert(base).second) return base;
    for (int i = 1;; ++i) {
      std::string candidate = base + "_" + std::to_string(i);
      if (taken_.insert(candidate).second) return candidate;
    }
  }

 private:
  std::set<std::string> taken_;
};

/// Renames bound variables so that every quantifier binds distinct names,
/// none of which occurs free. Names are kept where no clash arises.
inline Formula rename_apart(const Formula& f, NameSupply& names, const std::map<std::string, std::string>& scope = {}) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::exists: {
      auto inner = scope;
      std::vector<std::string> vars;
      for (const auto& v : f.bound()) {
        std::string fresh = names.fresh(v);
        inner[v] = fresh;
        vars.push_back(fresh);
      }
      return Formula::exists(std::move(vars), rename_apart(f.body(), names, inner));
    }
    case K::conjunction:
    case K::disjunction: {
      std::vector<Formula> parts;
      for (const auto& c : f.children()) parts.push_back(rename_apart(c, names, scope));
      return f.kind() == K::conjunction ? Formula::conjunction(std::move(parts))
                                        : Formula::disjunction(std::move(parts));
    }
    default:
      return substitute(f, scope);
  }
}

inline Formula rename_apart(const Formula& f) {
  NameSupply names;
  for (const auto& v : f.free_variables()) names.reserve(v);
  return rename_apart(f, names);
}

}  // namespace polycsp
