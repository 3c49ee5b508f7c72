#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "polycsp/rational.hpp"

namespace polycsp {

using RationalPoint = std::map<std::string, Rational>;
using QuadPoint = std::map<std::string, QuadExtNumber>;

enum class Polarity { eq, neq };

/// sum c_i x_i = d (eq) or != d (neq). Normalized so that zero coefficients
/// are dropped and the first coefficient (by variable name) is 1; a literal
/// without variables is normalized to constant 0 (0 = 0) or 1 (0 = 1).
class LinearLiteral {
 public:
  LinearLiteral() = default;

  LinearLiteral(std::map<std::string, Rational> coefficients, Rational constant, Polarity polarity)
      : coefficients_(std::move(coefficients)), constant_(std::move(constant)), polarity_(polarity) {
    std::erase_if(coefficients_, [](const auto& kv) { return kv.second == 0; });
    if (coefficients_.empty()) {
      constant_ = constant_ == 0 ? 0 : 1;
      return;
    }
    const Rational lead = coefficients_.begin()->second;
    for (auto& [_, c] : coefficients_) c /= lead;
    constant_ /= lead;
  }

  static LinearLiteral equation(std::map<std::string, Rational> c, Rational d) {
    return {std::move(c), std::move(d), Polarity::eq};
  }
  static LinearLiteral disequation(std::map<std::string, Rational> c, Rational d) {
    return {std::move(c), std::move(d), Polarity::neq};
  }

  const std::map<std::string, Rational>& coefficients() const { return coefficients_; }
  const Rational& constant() const { return constant_; }
  Polarity polarity() const { return polarity_; }
  bool positive() const { return polarity_ == Polarity::eq; }
  bool is_constant() const { return coefficients_.empty(); }

  LinearLiteral negated() const {
    LinearLiteral l = *this;
    l.polarity_ = positive() ? Polarity::neq : Polarity::eq;
    return l;
  }
  /// The underlying equation.
  LinearLiteral equation_part() const {
    LinearLiteral l = *this;
    l.polarity_ = Polarity::eq;
    return l;
  }

  template <class Point>
  bool holds(const Point& p) const {
    using V = typename Point::mapped_type;
    V sum{};
    for (const auto& [x, c] : coefficients_) {
      auto it = p.find(x);
      if (it == p.end()) throw InvalidInput("point has no coordinate '" + x + "'");
      sum += V(c) * it->second;
    }
    const bool equal = sum == V(constant_);
    return positive() ? equal : !equal;
  }

  std::string to_string() const {
    std::string s = positive() ? "" : "~";
    if (coefficients_.empty()) return s + "0 = " + constant_.str();
    bool first = true;
    for (const auto& [x, c] : coefficients_) {
      s += (first ? "" : " + ") + c.str() + "*" + x;
      first = false;
    }
    return s + " = " + constant_.str();
  }

  auto operator<=>(const LinearLiteral& o) const {
    if (auto c = polarity_ <=> o.polarity_; c != 0) return c;
    if (coefficients_ != o.coefficients_) return coefficients_ < o.coefficients_ ? std::strong_ordering::less
                                                                               : std::strong_ordering::greater;
    if (constant_ != o.constant_) return constant_ < o.constant_ ? std::strong_ordering::less
                                                                 : std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  bool operator==(const LinearLiteral& o) const {
    return polarity_ == o.polarity_ && coefficients_ == o.coefficients_ && constant_ == o.constant_;
  }

 private:
  std::map<std::string, Rational> coefficients_;
  Rational constant_ = 0;
  Polarity polarity_ = Polarity::eq;
};

using LinearClause = std::vector<LinearLiteral>;

/// Conjunction of clauses of linear literals over a fixed variable set.
class LinearCnf {
 public:
  LinearCnf() = default;

  explicit LinearCnf(std::vector<LinearClause> clauses, std::set<std::string> extra_variables = {})
      : clauses_(std::move(clauses)), variables_(std::move(extra_variables)) {
    for (auto& c : clauses_) {
      LinearClause unique;
      for (auto& l : c)
        if (std::find(unique.begin(), unique.end(), l) == unique.end()) unique.push_back(std::move(l));
      c = std::move(unique);
      for (const auto& l : c)
        for (const auto& [x, _] : l.coefficients()) variables_.insert(x);
    }
  }

  const std::vector<LinearClause>& clauses() const { return clauses_; }
  const std::set<std::string>& variables() const { return variables_; }

  /// At most one equation literal per clause.
  bool is_horn() const {
    for (const auto& c : clauses_)
      if (std::count_if(c.begin(), c.end(), [](const LinearLiteral& l) { return l.positive(); }) > 1) return false;
    return true;
  }

  template <class Point>
  bool holds(const Point& p) const {
    for (const auto& c : clauses_)
      if (std::none_of(c.begin(), c.end(), [&](const LinearLiteral& l) { return l.holds(p); })) return false;
    return true;
  }

  /// Same variables, different clauses.
  LinearCnf with_clauses(std::vector<LinearClause> clauses) const { return LinearCnf(std::move(clauses), variables_); }

  bool operator==(const LinearCnf&) const = default;

 private:
  std::vector<LinearClause> clauses_;
  std::set<std::string> variables_;
};

/// Affine subspace given by linear equations, kept in reduced row echelon form.
class AffineSystem {
 public:
  explicit AffineSystem(std::vector<std::string> variables) : vars_(std::move(variables)) {
    for (std::size_t i = 0; i < vars_.size(); ++i) index_[vars_[i]] = i;
  }

  const std::vector<std::string>& variables() const { return vars_; }
  bool consistent() const { return consistent_; }

  /// Adds the equation of `l` (its polarity is ignored). Returns consistency.
  bool add(const LinearLiteral& l) {
    if (!consistent_) return false;
    Row row = reduce(to_row(l));
    const auto pivot = first_nonzero(row);
    if (!pivot) {
      if (row.rhs != 0) consistent_ = false;
      return consistent_;
    }
    const Rational lead = row.coeffs[*pivot];
    for (auto& c : row.coeffs) c /= lead;
    row.rhs /= lead;
    for (auto& other : rows_) {
      const Rational f = other.coeffs[*pivot];
      if (f == 0) continue;
      for (std::size_t j = 0; j < vars_.size(); ++j) other.coeffs[j] -= f * row.coeffs[j];
      other.rhs -= f * row.rhs;
    }
    row.pivot = *pivot;
    rows_.push_back(std::move(row));
    return true;
  }

  /// Whether every solution satisfies the equation of `l`.
  bool entails(const LinearLiteral& l) const {
    if (!consistent_) return true;
    Row row = reduce(to_row(l));
    return !first_nonzero(row) && row.rhs == 0;
  }

  std::vector<std::size_t> free_columns() const {
    std::vector<bool> pivot(vars_.size(), false);
    for (const auto& r : rows_) pivot[r.pivot] = true;
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < vars_.size(); ++j)
      if (!pivot[j]) out.push_back(j);
    return out;
  }

  /// The solution with the given values of the free columns (in order).
  RationalPoint solution(const std::vector<Rational>& free_values) const {
    const auto free = free_columns();
    std::vector<Rational> x(vars_.size(), 0);
    for (std::size_t i = 0; i < free.size(); ++i) x[free[i]] = free_values.at(i);
    for (const auto& r : rows_) {
      Rational v = r.rhs;
      for (std::size_t j : free) v -= r.coeffs[j] * x[j];
      x[r.pivot] = v;
    }
    RationalPoint p;
    for (std::size_t j = 0; j < vars_.size(); ++j) p[vars_[j]] = x[j];
    return p;
  }

 private:
  struct Row {
    std::vector<Rational> coeffs;
    Rational rhs = 0;
    std::size_t pivot = 0;
  };

  Row to_row(const LinearLiteral& l) const {
    Row r{std::vector<Rational>(vars_.size(), 0), l.constant(), 0};
    for (const auto& [x, c] : l.coefficients()) {
      auto it = index_.find(x);
      if (it == index_.end()) throw InvalidInput("variable '" + x + "' not in system");
      r.coeffs[it->second] = c;
    }
    return r;
  }

  Row reduce(Row r) const {
    for (const auto& row : rows_) {
      const Rational f = r.coeffs[row.pivot];
      if (f == 0) continue;
      for (std::size_t j = 0; j < vars_.size(); ++j) r.coeffs[j] -= f * row.coeffs[j];
      r.rhs -= f * row.rhs;
    }
    return r;
  }

  static std::optional<std::size_t> first_nonzero(const Row& r) {
    for (std::size_t j = 0; j < r.coeffs.size(); ++j)
      if (r.coeffs[j] != 0) return j;
    return std::nullopt;
  }

  std::vector<std::string> vars_;
  std::map<std::string, std::size_t> index_;
  std::vector<Row> rows_;
  bool consistent_ = true;
};

namespace detail {

inline std::vector<std::string> variables_of(const std::vector<LinearLiteral>& a, const std::vector<LinearLiteral>& b,
                                             const std::set<std::string>& extra) {
  std::set<std::string> vars = extra;
  for (const auto* list : {&a, &b})
    for (const auto& l : *list)
      for (const auto& [x, _] : l.coefficients()) vars.insert(x);
  return {vars.begin(), vars.end()};
}

/// A solution of `system` satisfying every disequation in `neqs`, none of
/// whose equations is entailed. Free variables are set along the moment
/// curve t_j = s^(j+1) for s = 0, 1, 2, ...: each disequation restricted to
/// the solution space is a non-constant affine form or a non-zero constant,
/// so it vanishes for at most (#free) values of s and the scan stops after at
/// most |neqs| * #free + 1 steps.
inline RationalPoint generic_point(const AffineSystem& system, const std::vector<LinearLiteral>& neqs) {
  const auto free = system.free_columns();
  for (long s = 0;; ++s) {
    std::vector<Rational> values;
    Rational power = s;
    for (std::size_t j = 0; j < free.size(); ++j) {
      values.push_back(power);
      power *= s;
    }
    RationalPoint p = system.solution(values);
    if (std::all_of(neqs.begin(), neqs.end(), [&](const LinearLiteral& l) { return l.holds(p); })) return p;
  }
}

}  // namespace detail

/// Satisfiability of a conjunction of equations and disequations over Q:
/// the equations must be consistent and must not entail the equation of any
/// disequation (an affine space over an infinite field is not a finite union
/// of proper affine subspaces). The witness covers `extra` variables too.
inline std::optional<RationalPoint> conj_sat(const std::vector<LinearLiteral>& eqs,
                                             const std::vector<LinearLiteral>& neqs,
                                             const std::set<std::string>& extra = {}) {
  AffineSystem system(detail::variables_of(eqs, neqs, extra));
  for (const auto& e : eqs)
    if (!system.add(e)) return std::nullopt;
  for (const auto& n : neqs)
    if (system.entails(n)) return std::nullopt;
  std::vector<LinearLiteral> ds;
  for (const auto& n : neqs) ds.push_back(n.equation_part().negated());
  return detail::generic_point(system, ds);
}

namespace detail {

class CnfSearch {
 public:
  CnfSearch(const LinearCnf& f, std::uint64_t budget)
      : f_(f), budget_(budget), system_(std::vector<std::string>(f.variables().begin(), f.variables().end())) {}

  std::optional<RationalPoint> run() {
    if (!branch(0, system_)) return std::nullopt;
    return result_;
  }

 private:
  bool branch(std::size_t i, const AffineSystem& system) {
    if (++nodes_ > budget_) throw BudgetExceeded("linear CNF search exceeded budget");
    if (i == f_.clauses().size()) {
      result_ = generic_point(system, neqs_);
      return true;
    }
    for (const auto& l : f_.clauses()[i]) {
      if (l.positive()) {
        AffineSystem next = system;
        if (!next.add(l)) continue;
        if (std::any_of(neqs_.begin(), neqs_.end(), [&](const LinearLiteral& n) { return next.entails(n); }))
          continue;
        if (branch(i + 1, next)) return true;
      } else {
        if (system.entails(l)) continue;
        neqs_.push_back(l);
        const bool ok = branch(i + 1, system);
        neqs_.pop_back();
        if (ok) return true;
      }
    }
    return false;
  }

  const LinearCnf& f_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  AffineSystem system_;
  std::vector<LinearLiteral> neqs_;
  std::optional<RationalPoint> result_;
};

}  // namespace detail

/// Complete satisfiability check by branching on one literal per clause with
/// conj_sat-style pruning. The witness covers all variables of `f`.
inline std::optional<RationalPoint> cnf_sat(const LinearCnf& f, std::uint64_t budget = 5'000'000) {
  return detail::CnfSearch(f, budget).run();
}

namespace detail {

inline LinearCnf conjoin_units(const LinearCnf& base, std::vector<LinearClause> clauses,
                               const std::vector<LinearLiteral>& units) {
  for (const auto& u : units) clauses.push_back({u});
  return base.with_clauses(std::move(clauses));
}

inline std::vector<LinearClause> without(const std::vector<LinearClause>& clauses, std::size_t i) {
  auto rest = clauses;
  rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
  return rest;
}

inline std::vector<LinearLiteral> negations(const LinearClause& c, std::optional<std::size_t> skip = std::nullopt) {
  std::vector<LinearLiteral> out;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (j != skip) out.push_back(c[j].negated());
  return out;
}

}  // namespace detail

/// Whether the formula implies the clause.
inline bool entails_clause(const LinearCnf& f, const LinearClause& c, std::uint64_t budget = 5'000'000) {
  return !cnf_sat(detail::conjoin_units(f, f.clauses(), detail::negations(c)), budget);
}

/// Two CNFs over the same variables are equivalent when each entails every
/// clause of the other.
inline bool equivalent(const LinearCnf& f, const LinearCnf& g, std::uint64_t budget = 5'000'000) {
  for (const auto& c : g.clauses())
    if (!entails_clause(f, c, budget)) return false;
  for (const auto& c : f.clauses())
    if (!entails_clause(g, c, budget)) return false;
  return true;
}

/// Removes clauses entailed by the rest and literals L of clauses C for which
/// (F \ C) & L & ~(C \ L) is unsatisfiable, clause-major and literal-minor,
/// until nothing changes. The result is equivalent to the input.
inline LinearCnf make_irreducible(const LinearCnf& f, std::uint64_t budget = 5'000'000) {
  std::vector<LinearClause> clauses = f.clauses();
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < clauses.size() && !changed; ++i) {
      const auto rest = detail::without(clauses, i);
      if (!cnf_sat(detail::conjoin_units(f, rest, detail::negations(clauses[i])), budget)) {
        clauses = rest;
        changed = true;
      }
    }
    for (std::size_t i = 0; i < clauses.size() && !changed; ++i) {
      const auto rest = detail::without(clauses, i);
      for (std::size_t j = 0; j < clauses[i].size() && !changed; ++j) {
        auto units = detail::negations(clauses[i], j);
        units.push_back(clauses[i][j]);
        if (!cnf_sat(detail::conjoin_units(f, rest, units), budget)) {
          clauses[i].erase(clauses[i].begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
        }
      }
    }
  }
  return f.with_clauses(std::move(clauses));
}

struct HornVerdict {
  bool horn = false;
  LinearCnf irreducible;
  /// Non-Horn evidence: a clause of `irreducible` with two equation literals
  /// at `first` and `second`, and models a, a' of the formula where a makes
  /// exactly `first` true in the clause and a' exactly `second`.
  std::optional<std::size_t> clause;
  std::size_t first = 0, second = 0;
  std::optional<RationalPoint> a, a_prime;

  std::string complexity() const { return horn ? "CSP in P" : "CSP NP-complete"; }
};

inline HornVerdict classify_horn(const LinearCnf& f, std::uint64_t budget = 5'000'000) {
  HornVerdict out;
  out.irreducible = make_irreducible(f, budget);
  out.horn = out.irreducible.is_horn();
  if (out.horn) return out;
  const auto& clauses = out.irreducible.clauses();
  for (std::size_t i = 0; i < clauses.size() && !out.clause; ++i) {
    std::vector<std::size_t> pos;
    for (std::size_t j = 0; j < clauses[i].size(); ++j)
      if (clauses[i][j].positive()) pos.push_back(j);
    if (pos.size() < 2) continue;
    out.clause = i;
    out.first = pos[0];
    out.second = pos[1];
  }
  const auto& c = clauses[*out.clause];
  const auto rest = detail::without(clauses, *out.clause);
  auto witness = [&](std::size_t keep) {
    auto units = detail::negations(c, keep);
    units.push_back(c[keep]);
    auto p = cnf_sat(detail::conjoin_units(out.irreducible, rest, units), budget);
    if (!p) throw std::logic_error("irreducible clause has a redundant literal");
    return *p;
  };
  out.a = witness(out.first);
  out.a_prime = witness(out.second);
  return out;
}

struct HornSolution {
  bool sat = false;
  std::optional<RationalPoint> point;
  /// Equations added by propagation, in order.
  std::vector<LinearLiteral> derived;
};

/// Propagation for Horn CNF: keep an equation system S; a clause whose
/// negative literals' equations are all entailed by S fires its equation into
/// S. At the fixpoint the formula is unsatisfiable iff S is inconsistent or
/// some clause without equation has all its equations entailed. Otherwise a
/// generic point of S falsifies every non-entailed antecedent equation and so
/// satisfies every clause.
inline HornSolution horn_solve(const LinearCnf& f) {
  if (!f.is_horn()) throw InvalidInput("horn_solve needs a Horn CNF");
  HornSolution out;
  AffineSystem system(std::vector<std::string>(f.variables().begin(), f.variables().end()));
  std::vector<bool> fired(f.clauses().size(), false);
  auto antecedents_entailed = [&](const LinearClause& c) {
    return std::all_of(c.begin(), c.end(), [&](const LinearLiteral& l) { return l.positive() || system.entails(l); });
  };
  bool changed = true;
  while (changed && system.consistent()) {
    changed = false;
    for (std::size_t i = 0; i < f.clauses().size(); ++i) {
      const auto& c = f.clauses()[i];
      if (fired[i] || !antecedents_entailed(c)) continue;
      auto head = std::find_if(c.begin(), c.end(), [](const LinearLiteral& l) { return l.positive(); });
      if (head == c.end()) continue;
      fired[i] = true;
      changed = true;
      out.derived.push_back(*head);
      if (!system.add(*head)) break;
    }
  }
  if (!system.consistent()) return out;
  std::vector<LinearLiteral> neqs;
  for (const auto& c : f.clauses()) {
    const bool has_head = std::any_of(c.begin(), c.end(), [](const LinearLiteral& l) { return l.positive(); });
    if (!has_head && antecedents_entailed(c)) return out;
    for (const auto& l : c)
      if (!l.positive() && !system.entails(l)) neqs.push_back(l);
  }
  out.sat = true;
  out.point = detail::generic_point(system, neqs);
  return out;
}

/// Coordinate-wise e(x, y) = (1 - sqrt2) x + sqrt2 y = x + sqrt2 (y - x).
inline QuadPoint mix(const RationalPoint& p, const RationalPoint& q) {
  if (p.size() != q.size()) throw InvalidInput("mix of points of different dimension");
  QuadPoint out;
  for (const auto& [x, v] : p) {
    auto it = q.find(x);
    if (it == q.end()) throw InvalidInput("mix of points with different coordinates");
    out[x] = QuadExtNumber(v, it->second - v);
  }
  return out;
}

/// Whether mix(p, q) satisfies f, for models p and q of f.
inline bool check_mix_preservation(const LinearCnf& f, const RationalPoint& p, const RationalPoint& q) {
  if (!f.holds(p)) throw InvalidInput("first point does not satisfy the formula");
  if (!f.holds(q)) throw InvalidInput("second point does not satisfy the formula");
  return f.holds(mix(p, q));
}

}  // namespace polycsp
