#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "polycsp/evaluation.hpp"

namespace polycsp {

/// True iff `a` interprets `p4` as {(u, v, x, y) : u = v or x = y}.
inline bool interprets_p4(const Structure& a, const std::string& p4) {
  auto r = a.signature().find_relation(p4);
  if (!r || a.signature().relations()[*r].arity != 4) return false;
  bool ok = true;
  for_each_tuple(a.size(), 4, [&](const Tuple& t) {
    const bool expected = t[0] == t[1] || t[2] == t[3];
    if (a.holds(*r, t) != expected) ok = false;
  });
  return ok;
}

namespace detail {

class DisjunctionEliminator {
 public:
  DisjunctionEliminator(const Structure& a, std::string p4, const Formula& f, const Limits& limits)
      : a_(a), p4_(std::move(p4)), limits_(limits) {
    std::set<std::string> names;
    f.collect_names(names);
    names_ = NameSupply(names);
  }

  Formula rewrite(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind()) {
      case K::falsum:
      case K::atom:
      case K::equality:
        return f;
      case K::conjunction: {
        std::vector<Formula> parts;
        for (const auto& c : f.children()) parts.push_back(rewrite(c));
        return Formula::conjunction(std::move(parts));
      }
      case K::exists:
        return Formula::exists(f.bound(), rewrite(f.body()));
      case K::disjunction: {
        // Unsatisfiable disjuncts are dropped: the gadget below needs both
        // sides satisfiable on their own.
        std::vector<Formula> parts;
        for (const auto& c : f.children()) {
          Formula r = rewrite(c);
          if (satisfiable(r)) parts.push_back(std::move(r));
        }
        if (parts.empty()) return Formula::falsum();
        Formula acc = std::move(parts.front());
        for (std::size_t i = 1; i < parts.size(); ++i) acc = merge(acc, parts[i]);
        return acc;
      }
    }
    return f;
  }

 private:
  bool satisfiable(const Formula& f) {
    const auto free = f.free_variables();
    return evaluate(a_, Formula::exists({free.begin(), free.end()}, f), {}, limits_);
  }

  /// psi1 | psi2  ==>  exists X1' X2'' . psi1[X1'] & psi2[X2''] & theta, where
  /// theta = (X1' = X1) | (X2'' = X2) is written as the conjunction of
  /// P4(v', v, w'', w) over all v in X1, w in X2 (distributivity).
  Formula merge(const Formula& psi1, const Formula& psi2) {
    const auto free1 = psi1.free_variables();
    const auto free2 = psi2.free_variables();
    std::map<std::string, std::string> ren1, ren2;
    std::vector<std::string> bound;
    for (const auto& v : free1) bound.push_back(ren1[v] = names_.fresh(v + "_l"));
    for (const auto& v : free2) bound.push_back(ren2[v] = names_.fresh(v + "_r"));
    std::vector<Formula> parts{substitute(psi1, ren1), substitute(psi2, ren2)};
    for (const auto& v : free1)
      for (const auto& w : free2)
        parts.push_back(Formula::atom(
            p4_, {Term::var(ren1[v]), Term::var(v), Term::var(ren2[w]), Term::var(w)}));
    return Formula::exists(std::move(bound), Formula::conjunction(std::move(parts)));
  }

  const Structure& a_;
  std::string p4_;
  Limits limits_;
  NameSupply names_;
};

}  // namespace detail

/// Rewrites an ep formula into a pp formula equivalent to it on `a`, using
/// the relation `p4` (interpreted as u = v or x = y) to simulate each binary
/// disjunction. Dropping unsatisfiable disjuncts is relative to `a`, so the
/// result is equivalent on `a` and on every structure with the same pp theory.
inline Formula eliminate_disjunctions(const Formula& f, const std::string& p4, const Structure& a,
                                      const Limits& limits = {}) {
  auto r = a.signature().find_relation(p4);
  if (!r) throw InvalidInput("relation '" + p4 + "' not in signature");
  if (a.signature().relations()[*r].arity != 4) throw InvalidInput("relation '" + p4 + "' must have arity 4");
  if (!interprets_p4(a, p4)) throw InvalidInput("structure does not interpret '" + p4 + "' as (u=v | x=y)");
  check_symbols(f, a.signature());
  if (f.is_pp()) return f;
  const Formula renamed = rename_apart(f);
  return detail::DisjunctionEliminator(a, p4, renamed, limits).rewrite(renamed);
}

}  // namespace polycsp
