#pragma once

#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "polycsp/formula.hpp"
#include "polycsp/homomorphism.hpp"

namespace polycsp {

using Assignment = std::map<std::string, Element>;

/// One disjunct of a formula in existential disjunctive normal form:
/// exists bound . (conjunction of atoms and equalities).
struct PpClause {
  std::vector<std::string> bound;
  std::vector<Formula> atoms;
};

/// Distributes conjunction and quantification over disjunction. The input
/// must be renamed apart. `false` contributes no disjunct.
inline std::vector<PpClause> to_disjuncts(const Formula& f, std::size_t max_disjuncts = 100'000) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::falsum:
      return {};
    case K::atom:
    case K::equality:
      return {PpClause{{}, {f}}};
    case K::disjunction: {
      std::vector<PpClause> out;
      for (const auto& c : f.children()) {
        auto part = to_disjuncts(c, max_disjuncts);
        out.insert(out.end(), part.begin(), part.end());
        if (out.size() > max_disjuncts) throw BudgetExceeded("disjunctive normal form too large");
      }
      return out;
    }
    case K::conjunction: {
      std::vector<PpClause> acc{PpClause{}};
      for (const auto& c : f.children()) {
        auto part = to_disjuncts(c, max_disjuncts);
        if (acc.size() * part.size() > max_disjuncts) throw BudgetExceeded("disjunctive normal form too large");
        std::vector<PpClause> next;
        for (const auto& x : acc) {
          for (const auto& y : part) {
            PpClause z = x;
            z.bound.insert(z.bound.end(), y.bound.begin(), y.bound.end());
            z.atoms.insert(z.atoms.end(), y.atoms.begin(), y.atoms.end());
            next.push_back(std::move(z));
          }
        }
        acc = std::move(next);
      }
      return acc;
    }
    case K::exists: {
      auto inner = to_disjuncts(f.body(), max_disjuncts);
      for (auto& c : inner) c.bound.insert(c.bound.begin(), f.bound().begin(), f.bound().end());
      return inner;
    }
  }
  return {};
}

/// A structure whose elements are the equality classes of the variables of a
/// pp formula, carrying exactly the atoms of the formula.
struct CanonicalDatabase {
  Structure structure;
  std::map<std::string, Element> element_of;
};

/// Builds the canonical database of a conjunction of atoms over `variables`
/// (listed in the order their elements should be numbered). Equalities are
/// merged with union-find; every constant symbol of `sig` gets an element,
/// shared with the variables it is equated to.
inline CanonicalDatabase canonical_database(const Signature& sig, const std::vector<std::string>& variables,
                                            const std::vector<Formula>& atoms) {
  std::map<std::string, std::size_t> node;
  for (const auto& v : variables) node.emplace(v, node.size());
  const std::size_t nvars = node.size();
  const std::size_t nodes = nvars + sig.constants().size();
  std::vector<std::size_t> parent(nodes);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto node_of = [&](const Term& t) -> std::size_t {
    if (t.is_variable()) {
      auto it = node.find(t.name);
      if (it == node.end()) throw InvalidInput("unbound variable '" + t.name + "'");
      return it->second;
    }
    auto c = sig.find_constant(t.name);
    if (!c) throw InvalidInput("unknown constant symbol '" + t.name + "'");
    return nvars + *c;
  };
  for (const auto& a : atoms) {
    if (a.kind() != Formula::Kind::equality) continue;
    auto x = find(node_of(a.terms()[0]));
    auto y = find(node_of(a.terms()[1]));
    if (x != y) parent[std::max(x, y)] = std::min(x, y);
  }
  // Classes are numbered by their smallest node, i.e. first variable.
  std::vector<Element> elem(nodes, -1);
  int count = 0;
  for (std::size_t i = 0; i < nodes; ++i) {
    const auto r = find(i);
    if (elem[r] < 0) elem[r] = count++;
    elem[i] = elem[r];
  }
  CanonicalDatabase db{Structure(sig, std::max(count, 1)), {}};
  for (const auto& [name, idx] : node) db.element_of[name] = elem[idx];
  for (const auto& a : atoms) {
    if (a.kind() != Formula::Kind::atom) continue;
    Tuple t;
    for (const auto& term : a.terms()) t.push_back(elem[node_of(term)]);
    db.structure.add_tuple(a.relation(), std::move(t));
  }
  for (std::size_t c = 0; c < sig.constants().size(); ++c) db.structure.set_constant(c, elem[nvars + c]);
  return db;
}

/// A satisfying assignment of the free and (renamed) bound variables, or
/// nothing when `a` does not satisfy `f` under `sigma`. The pp case reduces to
/// a homomorphism search from the canonical database; disjunctions are
/// distributed to the top first.
inline std::optional<Assignment> satisfying_assignment(const Structure& a, const Formula& f,
                                                       const Assignment& sigma = {}, const Limits& limits = {}) {
  check_symbols(f, a.signature());
  const auto free = f.free_variables();
  for (const auto& v : free) {
    auto it = sigma.find(v);
    if (it == sigma.end()) throw InvalidInput("unbound free variable '" + v + "'");
    if (it->second < 0 || it->second >= a.size()) throw InvalidInput("assignment outside domain");
  }
  const Formula renamed = rename_apart(f);
  for (const auto& clause : to_disjuncts(renamed)) {
    std::vector<std::string> vars(free.begin(), free.end());
    vars.insert(vars.end(), clause.bound.begin(), clause.bound.end());
    const auto db = canonical_database(a.signature(), vars, clause.atoms);
    HomOptions options;
    for (const auto& v : free) options.pins.emplace_back(db.element_of.at(v), sigma.at(v));
    auto h = find_homomorphism(db.structure, a, options, limits);
    if (!h) continue;
    Assignment out;
    for (const auto& v : vars) out[v] = (*h)(db.element_of.at(v));
    return out;
  }
  return std::nullopt;
}

/// Truth of `f` in `a` under `sigma`; for sentences this is the CSP decision.
inline bool evaluate(const Structure& a, const Formula& f, const Assignment& sigma = {}, const Limits& limits = {}) {
  return satisfying_assignment(a, f, sigma, limits).has_value();
}

/// The relation defined by `f` over the listed free variables.
inline Relation extension(const Structure& a, const Formula& f, const std::vector<std::string>& vars,
                          const Limits& limits = {}) {
  for (const auto& v : f.free_variables())
    if (std::find(vars.begin(), vars.end(), v) == vars.end())
      throw InvalidInput("free variable '" + v + "' not listed");
  checked_pow(static_cast<std::uint64_t>(a.size()), static_cast<int>(vars.size()), limits.power_elements,
              "extension size");
  std::vector<Tuple> tuples;
  for_each_tuple(a.size(), static_cast<int>(vars.size()), [&](const Tuple& t) {
    Assignment sigma;
    for (std::size_t i = 0; i < vars.size(); ++i) sigma[vars[i]] = t[i];
    if (evaluate(a, f, sigma, limits)) tuples.push_back(t);
  });
  return Relation(static_cast<int>(vars.size()), std::move(tuples));
}

/// pp formula listing the positive facts of `a`, one variable per element.
/// Elements in `free_elements` get the corresponding name in `free_names`
/// and stay free (repeated elements are tied by equalities); the others are
/// named `bound_prefix` + index and existentially quantified. Constants are
/// pinned by equalities with the constant symbol.
inline Formula canonical_formula(const Structure& a, const std::vector<Element>& free_elements,
                                 const std::vector<std::string>& free_names, const std::string& bound_prefix = "x") {
  if (free_elements.size() != free_names.size()) throw InvalidInput("free element/name count mismatch");
  std::vector<std::string> name(static_cast<std::size_t>(a.size()));
  std::vector<Formula> atoms;
  for (std::size_t i = 0; i < free_elements.size(); ++i) {
    auto& slot = name.at(static_cast<std::size_t>(free_elements[i]));
    if (slot.empty())
      slot = free_names[i];
    else
      atoms.push_back(Formula::equality(Term::var(slot), Term::var(free_names[i])));
  }
  std::vector<std::string> bound;
  std::set<std::string> taken(free_names.begin(), free_names.end());
  NameSupply names(taken);
  for (int e = 0; e < a.size(); ++e) {
    auto& slot = name[static_cast<std::size_t>(e)];
    if (!slot.empty()) continue;
    slot = names.fresh(bound_prefix + std::to_string(e));
    bound.push_back(slot);
  }
  for (std::size_t r = 0; r < a.relations().size(); ++r) {
    for (const auto& t : a.relation(r)) {
      std::vector<Term> args;
      for (Element e : t) args.push_back(Term::var(name[static_cast<std::size_t>(e)]));
      atoms.push_back(Formula::atom(a.signature().relations()[r].name, std::move(args)));
    }
  }
  for (std::size_t c = 0; c < a.constants().size(); ++c)
    atoms.push_back(Formula::equality(Term::var(name[static_cast<std::size_t>(a.constant(c))]),
                                      Term::constant(a.signature().constants()[c])));
  if (atoms.empty()) atoms.push_back(Formula::equality(Term::var(name[0]), Term::var(name[0])));
  Formula body = atoms.size() == 1 ? atoms.front() : Formula::conjunction(std::move(atoms));
  return Formula::exists(std::move(bound), std::move(body));
}

/// The canonical query: exists x0 ... x(n-1) . (conjunction of all facts).
inline Formula canonical_query(const Structure& a) { return canonical_formula(a, {}, {}); }

/// Inverse of canonical_query for a pp formula: the structure on the
/// variables modulo equality, with one tuple per atom.
inline CanonicalDatabase canonical_structure(const Formula& f, const Signature& sig) {
  if (!f.is_pp()) throw InvalidInput("canonical structure needs a pp formula");
  check_symbols(f, sig);
  const Formula renamed = rename_apart(f);
  auto clauses = to_disjuncts(renamed);
  if (clauses.empty()) throw InvalidInput("formula contains 'false': trivially false instance");
  const auto free = f.free_variables();
  std::vector<std::string> vars(free.begin(), free.end());
  vars.insert(vars.end(), clauses.front().bound.begin(), clauses.front().bound.end());
  return canonical_database(sig, vars, clauses.front().atoms);
}

/// The boolean value F_A(f): quantifiers dropped, atoms over empty relations
/// false, every other atom (equalities included) true.
inline bool local_refutation_value(const Structure& a, const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::falsum:
      return false;
    case K::atom:
      return !a.relation(f.relation()).empty();
    case K::equality:
      return true;
    case K::conjunction:
      for (const auto& c : f.children())
        if (!local_refutation_value(a, c)) return false;
      return true;
    case K::disjunction:
      for (const auto& c : f.children())
        if (local_refutation_value(a, c)) return true;
      return false;
    case K::exists:
      return local_refutation_value(a, f.body());
  }
  return false;
}

enum class ConstantHandling { with_constants, relational_only };

struct LocalRefutability {
  bool refutable = false;
  /// Element d with (d, ..., d) in every non-empty relation (and equal to
  /// every constant unless constants are ignored).
  std::optional<Element> diagonal;
  /// Sentence true under F_A but false in the structure.
  std::optional<Formula> counterexample;
};

/// Decides local refutability. For a finite structure F_A(phi) true implies
/// that some disjunct mentions only non-empty relations, and all such
/// disjuncts are satisfied by sending every variable to a diagonal element;
/// conversely the sentence "exists x . R(x,...,x) for every non-empty R"
/// separates F_A from truth when no diagonal element exists.
inline LocalRefutability is_locally_refutable(const Structure& a,
                                              ConstantHandling constants = ConstantHandling::with_constants) {
  LocalRefutability out;
  for (Element d = 0; d < a.size() && !out.diagonal; ++d) {
    bool ok = true;
    if (constants == ConstantHandling::with_constants)
      for (Element c : a.constants()) ok = ok && c == d;
    for (std::size_t r = 0; r < a.relations().size() && ok; ++r) {
      if (a.relation(r).empty()) continue;
      ok = a.holds(r, Tuple(static_cast<std::size_t>(a.signature().relations()[r].arity), d));
    }
    if (ok) out.diagonal = d;
  }
  out.refutable = out.diagonal.has_value();
  if (!out.refutable) {
    std::vector<Formula> atoms;
    for (std::size_t r = 0; r < a.relations().size(); ++r) {
      if (a.relation(r).empty()) continue;
      const auto& sym = a.signature().relations()[r];
      atoms.push_back(Formula::atom(sym.name, std::vector<Term>(static_cast<std::size_t>(sym.arity), Term::var("x"))));
    }
    if (constants == ConstantHandling::with_constants)
      for (const auto& c : a.signature().constants())
        atoms.push_back(Formula::equality(Term::var("x"), Term::constant(c)));
    Formula body = atoms.size() == 1 ? atoms.front() : Formula::conjunction(std::move(atoms));
    out.counterexample = Formula::exists({"x"}, std::move(body));
  }
  return out;
}

}  // namespace polycsp
