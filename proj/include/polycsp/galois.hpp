#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polycsp/clones.hpp"
#include "polycsp/evaluation.hpp"

namespace polycsp {

namespace detail {

struct ClosureComputation {
  Relation closure;
  /// For every tuple of the closure outside r: an indicator homomorphism
  /// power(a, t) -> a sending the columns of r to it.
  std::map<Tuple, std::vector<Element>> extra;
};

/// Column i of r's tuple list, read as an element of A^t (row-major).
inline std::vector<Element> columns_of(const Structure& a, const Relation& r) {
  std::vector<Element> cols;
  for (int i = 0; i < r.arity(); ++i) {
    Tuple col;
    for (const auto& t : r) col.push_back(t[static_cast<std::size_t>(i)]);
    cols.push_back(static_cast<Element>(encode_tuple(col, a.size())));
  }
  return cols;
}

inline void check_relation(const Structure& a, const Relation& r) {
  if (r.arity() < 1) throw InvalidInput("relation arity must be >= 1");
  for (const auto& t : r)
    for (Element e : t)
      if (e < 0 || e >= a.size()) throw InvalidInput("relation tuple outside the domain");
}

inline ClosureComputation compute_closure(const Structure& a, const Relation& r, bool stop_at_first_extra,
                                          const Limits& limits) {
  check_relation(a, r);
  ClosureComputation out{Relation(r.arity()), {}};
  if (r.empty()) return out;
  const int t = static_cast<int>(r.size());
  checked_pow(static_cast<std::uint64_t>(a.size()), t, limits.closure_elements, "pp-closure indicator power");
  const Structure indicator = power(a, t, limits);
  const auto cols = columns_of(a, r);
  std::vector<Tuple> tuples;
  bool stop = false;
  for_each_tuple(a.size(), r.arity(), [&](const Tuple& b) {
    if (stop) return;
    if (r.contains(b)) {
      tuples.push_back(b);
      return;
    }
    HomOptions options;
    for (std::size_t i = 0; i < cols.size(); ++i) options.pins.emplace_back(cols[i], b[i]);
    auto h = find_homomorphism(indicator, a, options, limits);
    if (!h) return;
    tuples.push_back(b);
    out.extra.emplace(b, std::move(h->map));
    if (stop_at_first_extra) stop = true;
  });
  out.closure = Relation(r.arity(), std::move(tuples));
  return out;
}

inline bool is_full(const Structure& a, const Relation& r) {
  std::uint64_t n = 1;
  for (int i = 0; i < r.arity(); ++i) n *= static_cast<std::uint64_t>(a.size());
  return r.size() == n;
}

inline std::optional<std::size_t> own_relation(const Structure& a, const Relation& r) {
  for (std::size_t i = 0; i < a.relations().size(); ++i)
    if (a.relation(i) == r) return i;
  return std::nullopt;
}

}  // namespace detail

/// Variable names x1, ..., xm used for the free positions of definitions.
inline std::vector<std::string> definition_variables(int arity) {
  std::vector<std::string> v;
  for (int i = 1; i <= arity; ++i) v.push_back("x" + std::to_string(i));
  return v;
}

/// Smallest pp-definable relation containing r: the set of images of the
/// columns of r under all homomorphisms power(a, |r|) -> a. The closure of
/// the empty relation is empty (defined by `false`).
inline Relation pp_closure(const Structure& a, const Relation& r, const Limits& limits = {}) {
  if (detail::is_full(a, r)) return r;
  return detail::compute_closure(a, r, false, limits).closure;
}

/// Synthesizes a pp definition of r over the variables x1..xm: the canonical
/// formula of power(a, |r|) with the column elements left free. The result is
/// checked to define exactly r.
inline Formula synthesize_pp_definition(const Structure& a, const Relation& r, const Limits& limits = {}) {
  detail::check_relation(a, r);
  const auto vars = definition_variables(r.arity());
  if (r.empty()) return Formula::falsum();
  if (detail::is_full(a, r)) {
    std::vector<Formula> eqs;
    for (const auto& v : vars) eqs.push_back(Formula::equality(Term::var(v), Term::var(v)));
    return eqs.size() == 1 ? eqs.front() : Formula::conjunction(std::move(eqs));
  }
  if (auto own = detail::own_relation(a, r)) {
    std::vector<Term> args;
    for (const auto& v : vars) args.push_back(Term::var(v));
    return Formula::atom(a.signature().relations()[*own].name, std::move(args));
  }
  const int t = static_cast<int>(r.size());
  checked_pow(static_cast<std::uint64_t>(a.size()), t, limits.closure_elements, "pp-closure indicator power");
  const Structure indicator = power(a, t, limits);
  Formula f = canonical_formula(indicator, detail::columns_of(a, r), vars, "y");
  if (extension(a, f, vars, limits) != r) throw InvalidInput("relation is not pp-definable");
  return f;
}

/// Greedily drops atoms of a pp definition while it still defines r, then
/// drops unused quantified variables. Skipped above `max_atoms` atoms.
inline Formula simplify_definition(const Structure& a, const Formula& f, const Relation& r,
                                   std::size_t max_atoms = 64, const Limits& limits = {}) {
  if (!f.is_pp()) throw InvalidInput("simplifier needs a pp formula");
  const auto vars = definition_variables(r.arity());
  const Formula renamed = rename_apart(f);
  auto clauses = to_disjuncts(renamed);
  if (clauses.size() != 1 || clauses.front().atoms.size() > max_atoms) return f;
  auto clause = clauses.front();
  auto build = [&](const std::vector<Formula>& atoms) {
    std::set<std::string> used;
    for (const auto& at : atoms)
      for (const auto& term : at.terms())
        if (term.is_variable()) used.insert(term.name);
    std::vector<std::string> bound;
    for (const auto& v : clause.bound)
      if (used.count(v)) bound.push_back(v);
    std::vector<Formula> body = atoms;
    // keep every free variable mentioned so the formula stays total on x1..xm
    for (const auto& v : vars)
      if (!used.count(v)) body.push_back(Formula::equality(Term::var(v), Term::var(v)));
    Formula b = body.size() == 1 ? body.front() : Formula::conjunction(std::move(body));
    return Formula::exists(std::move(bound), std::move(b));
  };
  std::vector<Formula> atoms = clause.atoms;
  for (std::size_t i = 0; i < atoms.size();) {
    auto trial = atoms;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
    if (extension(a, build(trial), vars, limits) == r)
      atoms = std::move(trial);
    else
      ++i;
  }
  return build(atoms);
}

struct PpDefinabilityCertificate {
  bool definable = false;
  /// Positive side: a pp formula over x1..xm defining r.
  std::optional<Formula> definition;
  /// Negative side: a polymorphism mapping the rows of r (as columns)
  /// to `image`, which lies outside r.
  std::optional<OperationTable> violating_operation;
  std::vector<Tuple> rows;
  Tuple image;
};

/// Checks a certificate independently of how it was produced.
inline bool validates(const Structure& a, const Relation& r, const PpDefinabilityCertificate& c,
                      const Limits& limits = {}) {
  if (c.definable) {
    if (!c.definition) return false;
    return extension(a, *c.definition, definition_variables(r.arity()), limits) == r;
  }
  if (!c.violating_operation || !c.violating_operation->preserves(a)) return false;
  if (c.rows.size() != static_cast<std::size_t>(c.violating_operation->arity())) return false;
  std::vector<const Tuple*> rows;
  for (const auto& t : c.rows) {
    if (!r.contains(t)) return false;
    rows.push_back(&t);
  }
  const Tuple image = c.violating_operation->apply_columns(rows, static_cast<std::size_t>(r.arity()));
  return image == c.image && !r.contains(image);
}

inline PpDefinabilityCertificate is_pp_definable(const Structure& a, const Relation& r, const Limits& limits = {}) {
  detail::check_relation(a, r);
  PpDefinabilityCertificate out;
  if (r.empty() || detail::is_full(a, r) || detail::own_relation(a, r)) {
    out.definable = true;
    out.definition = synthesize_pp_definition(a, r, limits);
    return out;
  }
  auto comp = detail::compute_closure(a, r, true, limits);
  if (comp.extra.empty()) {
    out.definable = true;
    out.definition = synthesize_pp_definition(a, r, limits);
    return out;
  }
  const auto& [image, map] = *comp.extra.begin();
  out.violating_operation = OperationTable(a.size(), static_cast<int>(r.size()), map);
  out.rows = r.tuples();
  out.image = image;
  return out;
}

/// pp-type containment: every pp formula true of `lhs` is true of `rhs`,
/// i.e. some endomorphism sends lhs to rhs coordinate-wise.
inline bool pp_type_leq(const Structure& a, const Tuple& lhs, const Tuple& rhs, const Limits& limits = {}) {
  if (lhs.size() != rhs.size()) throw InvalidInput("pp-type comparison of tuples of different lengths");
  HomOptions options;
  for (std::size_t i = 0; i < lhs.size(); ++i) options.pins.emplace_back(lhs[i], rhs[i]);
  return has_homomorphism(a, a, options, limits);
}

struct PpTypeReport {
  int arity = 0;
  /// Classes of mutually pp-type-equivalent tuples, in order of their first tuple.
  std::vector<std::vector<Tuple>> classes;
  /// Indices into `classes` of the maximal classes.
  std::vector<std::size_t> maximal;
  /// below[i][j]: class i's type is contained in class j's.
  std::vector<std::vector<bool>> below;

  std::size_t count() const { return maximal.size(); }
};

inline PpTypeReport count_maximal_pp_types(const Structure& a, int n, const Limits& limits = {}) {
  if (n < 1) throw InvalidInput("tuple length must be >= 1");
  const auto total = checked_pow(static_cast<std::uint64_t>(a.size()), n, 1024, "pp-type tuple count");
  std::vector<Tuple> tuples;
  for_each_tuple(a.size(), n, [&](const Tuple& t) { tuples.push_back(t); });
  const std::size_t N = static_cast<std::size_t>(total);
  std::vector<std::vector<bool>> leq(N, std::vector<bool>(N, false));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) leq[i][j] = i == j || pp_type_leq(a, tuples[i], tuples[j], limits);

  PpTypeReport out;
  out.arity = n;
  std::vector<std::size_t> class_of(N, SIZE_MAX);
  std::vector<std::size_t> representative;
  for (std::size_t i = 0; i < N; ++i) {
    if (class_of[i] != SIZE_MAX) continue;
    class_of[i] = out.classes.size();
    representative.push_back(i);
    out.classes.push_back({tuples[i]});
    for (std::size_t j = i + 1; j < N; ++j) {
      if (class_of[j] == SIZE_MAX && leq[i][j] && leq[j][i]) {
        class_of[j] = class_of[i];
        out.classes.back().push_back(tuples[j]);
      }
    }
  }
  const std::size_t C = out.classes.size();
  out.below.assign(C, std::vector<bool>(C, false));
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t d = 0; d < C; ++d) out.below[c][d] = leq[representative[c]][representative[d]];
  for (std::size_t c = 0; c < C; ++c) {
    bool maximal = true;
    for (std::size_t d = 0; d < C && maximal; ++d)
      if (out.below[c][d] && !out.below[d][c]) maximal = false;
    if (maximal) out.maximal.push_back(c);
  }
  return out;
}

struct OmegaCategoricityReport {
  /// counts[i] = number of maximal pp-(i+1)-types.
  std::vector<std::size_t> counts;
  /// A finite template is trivially CSP-equivalent to an omega-categorical one.
  std::string verdict = "yes (finite)";
};

inline OmegaCategoricityReport omega_categoricity_report(const Structure& a, int n_max, const Limits& limits = {}) {
  OmegaCategoricityReport out;
  for (int n = 1; n <= n_max; ++n) out.counts.push_back(count_maximal_pp_types(a, n, limits).count());
  return out;
}

}  // namespace polycsp
