#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "polycsp/constructions.hpp"

namespace polycsp {

/// Explicit k-ary operation on {0, ..., n-1}. The value of (x_1, ..., x_k)
/// sits at the row-major index sum x_i * n^(k-i), matching the element
/// encoding of power(a, k).
class OperationTable {
 public:
  OperationTable() = default;

  OperationTable(int domain, int arity, std::vector<Element> values)
      : domain_(domain), arity_(arity), values_(std::move(values)) {
    if (domain_ < 1 || arity_ < 1) throw InvalidInput("operation needs domain >= 1 and arity >= 1");
    const auto len = checked_pow(static_cast<std::uint64_t>(domain_), arity_, UINT32_MAX, "operation table");
    if (values_.size() != len) throw InvalidInput("operation table has wrong length");
    for (Element v : values_)
      if (v < 0 || v >= domain_) throw InvalidInput("operation value outside domain");
  }

  static OperationTable projection(int domain, int arity, int coordinate) {
    std::vector<Element> v;
    for_each_tuple(domain, arity, [&](const Tuple& t) { v.push_back(t[static_cast<std::size_t>(coordinate)]); });
    return OperationTable(domain, arity, std::move(v));
  }

  template <class F>
  static OperationTable from_function(int domain, int arity, F&& f) {
    std::vector<Element> v;
    for_each_tuple(domain, arity, [&](const Tuple& t) { v.push_back(static_cast<Element>(f(t))); });
    return OperationTable(domain, arity, std::move(v));
  }

  int domain() const { return domain_; }
  int arity() const { return arity_; }
  const std::vector<Element>& values() const { return values_; }

  Element operator()(std::span<const Element> args) const {
    if (static_cast<int>(args.size()) != arity_) throw InvalidInput("wrong number of arguments");
    return values_[encode_tuple(args, domain_)];
  }

  /// Applies the operation coordinate-wise to `rows` (each a tuple of `r`).
  Tuple apply_columns(const std::vector<const Tuple*>& rows, std::size_t width) const {
    Tuple out(width);
    Tuple args(static_cast<std::size_t>(arity_));
    for (std::size_t i = 0; i < width; ++i) {
      for (std::size_t j = 0; j < args.size(); ++j) args[j] = (*rows[j])[i];
      out[i] = (*this)(args);
    }
    return out;
  }

  /// Exhaustive preservation check over all |r|^k choices of rows. When the
  /// check fails and `violation` is given, it receives the offending rows.
  bool preserves(const Relation& r, std::vector<Tuple>* violation = nullptr) const {
    if (r.empty()) return true;
    std::vector<const Tuple*> rows(static_cast<std::size_t>(arity_));
    bool ok = true;
    auto rec = [&](auto&& self, std::size_t j) -> void {
      if (!ok) return;
      if (j == rows.size()) {
        if (!r.contains(apply_columns(rows, static_cast<std::size_t>(r.arity())))) {
          ok = false;
          if (violation) {
            violation->clear();
            for (const auto* t : rows) violation->push_back(*t);
          }
        }
        return;
      }
      for (const auto& t : r) {
        rows[j] = &t;
        self(self, j + 1);
      }
    };
    rec(rec, 0);
    return ok;
  }

  /// Polymorphism check: every relation and every constant is preserved.
  bool preserves(const Structure& a) const {
    if (domain_ != a.size()) return false;
    for (Element c : a.constants())
      if ((*this)(Tuple(static_cast<std::size_t>(arity_), c)) != c) return false;
    for (const auto& r : a.relations())
      if (!preserves(r)) return false;
    return true;
  }

  auto operator<=>(const OperationTable&) const = default;

 private:
  int domain_ = 0;
  int arity_ = 0;
  std::vector<Element> values_;
};

inline nlohmann::json operation_to_json(const OperationTable& f) {
  return {{"n", f.domain()}, {"k", f.arity()}, {"values", f.values()}};
}

inline OperationTable operation_from_json(const nlohmann::json& j) {
  for (const auto& [key, _] : j.items())
    if (key != "n" && key != "k" && key != "values") throw ParseError("operation: unknown field '" + key + "'", 0, 0);
  try {
    return OperationTable(j.at("n").get<int>(), j.at("k").get<int>(), j.at("values").get<std::vector<Element>>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("operation: ") + e.what(), 0, 0);
  }
}

/// Calls `visit(OperationTable)` for each k-ary polymorphism of `a` in
/// lexicographic order of value tables until `visit` returns false.
template <class Visit>
void for_each_polymorphism(const Structure& a, int k, Visit&& visit, const Limits& limits = {}) {
  const Structure p = power(a, k, limits);
  for_each_homomorphism(
      p, a, [&](const std::vector<Element>& m) { return visit(OperationTable(a.size(), k, m)); }, {}, limits);
}

/// All k-ary polymorphisms of `a`, i.e. homomorphisms power(a, k) -> a.
inline std::vector<OperationTable> enumerate_polymorphisms(const Structure& a, int k, const Limits& limits = {}) {
  std::vector<OperationTable> out;
  for_each_polymorphism(
      a, k,
      [&](OperationTable f) {
        if (out.size() >= limits.solutions)
          throw BudgetExceeded("more than " + std::to_string(limits.solutions) + " polymorphisms");
        out.push_back(std::move(f));
        return true;
      },
      limits);
  return out;
}

inline std::uint64_t count_polymorphisms(const Structure& a, int k, const Limits& limits = {}) {
  std::uint64_t n = 0;
  for_each_polymorphism(
      a, k,
      [&](const OperationTable&) {
        if (++n > limits.solutions)
          throw BudgetExceeded("more than " + std::to_string(limits.solutions) + " polymorphisms");
        return true;
      },
      limits);
  return n;
}

/// Two disjoint coordinate sets X, Y on which f depends:
/// f(x[X/w]) != f(x[X/w']) and f(y[Y/z]) != f(y[Y/z']).
struct EssentialityWitness {
  std::vector<int> x_coords;
  std::vector<int> y_coords;
  Tuple x, w, w_prime;
  Tuple y, z, z_prime;
};

/// base with the coordinates in `coords` taken from `from`.
inline Tuple replace_coordinates(const Tuple& base, const std::vector<int>& coords, const Tuple& from) {
  Tuple t = base;
  for (int c : coords) t[static_cast<std::size_t>(c)] = from[static_cast<std::size_t>(c)];
  return t;
}

inline bool validates(const OperationTable& f, const EssentialityWitness& w) {
  if (w.x_coords.empty() || w.y_coords.empty()) return false;
  for (int i : w.x_coords)
    for (int j : w.y_coords)
      if (i == j) return false;
  return f(replace_coordinates(w.x, w.x_coords, w.w)) != f(replace_coordinates(w.x, w.x_coords, w.w_prime)) &&
         f(replace_coordinates(w.y, w.y_coords, w.z)) != f(replace_coordinates(w.y, w.y_coords, w.z_prime));
}

struct EssentialUnarity {
  bool essentially_unary = false;
  /// When essentially unary: f(x) = g(x_coordinate), 0-based, with g as a table.
  int coordinate = 0;
  std::vector<Element> unary;
  std::optional<EssentialityWitness> witness;
};

/// Coordinates f depends on, each with a tuple and a replacement value
/// that changes f.
inline std::vector<std::pair<int, std::pair<Tuple, Element>>> essential_coordinates(const OperationTable& f) {
  std::vector<std::pair<int, std::pair<Tuple, Element>>> out;
  for (int i = 0; i < f.arity(); ++i) {
    bool found = false;
    for_each_tuple(f.domain(), f.arity(), [&](const Tuple& t) {
      if (found) return;
      Tuple u = t;
      for (Element d = 0; d < f.domain() && !found; ++d) {
        u[static_cast<std::size_t>(i)] = d;
        if (f(u) != f(t)) {
          found = true;
          out.push_back({i, {t, d}});
        }
      }
    });
  }
  return out;
}

inline EssentialUnarity is_essentially_unary(const OperationTable& f) {
  EssentialUnarity out;
  const auto essential = essential_coordinates(f);
  if (essential.size() <= 1) {
    out.essentially_unary = true;
    out.coordinate = essential.empty() ? 0 : essential.front().first;
    for (Element d = 0; d < f.domain(); ++d)
      out.unary.push_back(f(Tuple(static_cast<std::size_t>(f.arity()), d)));
    return out;
  }
  // Singletons X = {i}, Y = {j} of two essential coordinates; x = w = t and
  // w' differs from t only at the changed coordinate.
  auto single = [&](const std::pair<int, std::pair<Tuple, Element>>& e, std::vector<int>& coords, Tuple& base,
                    Tuple& a, Tuple& b) {
    coords = {e.first};
    base = e.second.first;
    a = base;
    b = base;
    b[static_cast<std::size_t>(e.first)] = e.second.second;
  };
  EssentialityWitness w;
  single(essential[0], w.x_coords, w.x, w.w, w.w_prime);
  single(essential[1], w.y_coords, w.y, w.z, w.z_prime);
  out.witness = std::move(w);
  return out;
}

struct OperationFlags {
  bool idempotent = false;
  bool conservative = false;
  bool projection = false;
};

inline OperationFlags operation_predicates(const OperationTable& f) {
  OperationFlags flags{true, true, false};
  for (Element d = 0; d < f.domain(); ++d)
    if (f(Tuple(static_cast<std::size_t>(f.arity()), d)) != d) flags.idempotent = false;
  for_each_tuple(f.domain(), f.arity(), [&](const Tuple& t) {
    if (std::find(t.begin(), t.end(), f(t)) == t.end()) flags.conservative = false;
  });
  for (int i = 0; i < f.arity() && !flags.projection; ++i)
    flags.projection = f == OperationTable::projection(f.domain(), f.arity(), i);
  return flags;
}

/// Outcome of checking essential unarity of all polymorphisms up to a
/// finite arity. Says nothing about higher or infinite arities.
struct BoundedUnarityVerdict {
  int arity_bound = 0;
  bool all_essentially_unary = false;
  std::optional<OperationTable> counterexample;
  std::optional<EssentialityWitness> witness;

  std::string describe() const {
    if (all_essentially_unary)
      return "all polymorphisms of arity <= " + std::to_string(arity_bound) +
             " are essentially unary (bounded check)";
    return "polymorphism of arity " + std::to_string(counterexample ? counterexample->arity() : 0) +
           " is not essentially unary";
  }
};

inline BoundedUnarityVerdict all_polymorphisms_essentially_unary(const Structure& a, int max_arity,
                                                                 const Limits& limits = {}) {
  if (max_arity < 2) throw InvalidInput("arity bound must be >= 2");
  BoundedUnarityVerdict out;
  out.arity_bound = max_arity;
  for (int k = 2; k <= max_arity && !out.counterexample; ++k) {
    for_each_polymorphism(
        a, k,
        [&](OperationTable f) {
          auto u = is_essentially_unary(f);
          if (u.essentially_unary) return true;
          out.witness = u.witness;
          out.counterexample = std::move(f);
          return false;
        },
        limits);
  }
  out.all_essentially_unary = !out.counterexample;
  return out;
}

struct CoreVerdict {
  bool core = false;
  /// An endomorphism that is not an embedding, when not a core.
  std::optional<Homomorphism> non_embedding;
};

/// A is a core iff every endomorphism is an embedding.
inline CoreVerdict is_core(const Structure& a, const Limits& limits = {}) {
  CoreVerdict out{true, std::nullopt};
  for_each_homomorphism(
      a, a,
      [&](const std::vector<Element>& m) {
        if (is_embedding(a, a, m)) return true;
        out.core = false;
        out.non_embedding = Homomorphism{m};
        return false;
      },
      {}, limits);
  return out;
}

/// For a finite structure, existential-positive closedness in its own pp
/// theory coincides with being a core: endomorphisms preserve every
/// pp-definable relation, so expanding by them leaves the endomorphisms
/// unchanged.
inline bool is_epc_finite(const Structure& a, const Limits& limits = {}) { return is_core(a, limits).core; }

}  // namespace polycsp
