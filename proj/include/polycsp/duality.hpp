#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "polycsp/clones.hpp"
#include "polycsp/evaluation.hpp"

namespace polycsp {

/// A finite constant-free structure with no homomorphism to the template.
struct Obstruction {
  Structure structure;
  bool critical = false;
  /// Total number of relation tuples.
  std::size_t hyperedges = 0;
};

struct ObstructionBounds {
  int max_vertices = 5;
  int max_tuples = 10;
};

/// An n-ary polymorphism that is a homomorphism from the one-tolerant n-th
/// power of `a` to `a`, if any.
inline std::optional<OperationTable> has_one_tolerant_polymorphism(const Structure& a, int n,
                                                                   const Limits& limits = {}) {
  if (n < 3) throw InvalidInput("one-tolerant polymorphisms have arity >= 3");
  const Structure p = one_tolerant_power(a, n, limits);
  auto h = find_homomorphism(p, a, {}, limits);
  if (!h) return std::nullopt;
  return OperationTable(a.size(), n, std::move(h->map));
}

/// The template as seen by constant-free instances.
inline Structure relational_reduct(const Structure& a) {
  return Structure(a.signature().relational_reduct(), a.size(), a.relations(), {});
}

/// Canonical form under relabeling: vertices are ordered by an invariant
/// (occurrence counts per relation and position), and the lexicographically
/// least tuple listing over all labelings compatible with that order is kept.
inline std::vector<int> canonical_key(const Structure& s) {
  const int n = s.size();
  const std::size_t R = s.relations().size();
  std::vector<std::vector<int>> inv(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    auto& iv = inv[static_cast<std::size_t>(v)];
    for (std::size_t r = 0; r < R; ++r) {
      const int k = s.signature().relations()[r].arity;
      std::vector<int> pos(static_cast<std::size_t>(k) + 1, 0);
      for (const auto& t : s.relation(r)) {
        int mult = 0;
        for (int p = 0; p < k; ++p)
          if (t[static_cast<std::size_t>(p)] == v) {
            ++pos[static_cast<std::size_t>(p)];
            ++mult;
          }
        if (mult > 1) ++pos[static_cast<std::size_t>(k)];
      }
      iv.insert(iv.end(), pos.begin(), pos.end());
    }
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return inv[static_cast<std::size_t>(x)] < inv[static_cast<std::size_t>(y)]; });
  // blocks of equal invariant
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && inv[static_cast<std::size_t>(order[j])] == inv[static_cast<std::size_t>(order[i])]) ++j;
    blocks.emplace_back(i, j);
    i = j;
  }

  std::vector<int> prefix{n};
  for (int v : order) prefix.insert(prefix.end(), inv[static_cast<std::size_t>(v)].begin(), inv[static_cast<std::size_t>(v)].end());

  std::vector<int> best;
  std::vector<int> label(static_cast<std::size_t>(n));
  auto encode = [&]() {
    std::vector<int> key;
    for (std::size_t r = 0; r < R; ++r) {
      std::vector<Tuple> ts;
      for (const auto& t : s.relation(r)) {
        Tuple u(t.size());
        for (std::size_t p = 0; p < t.size(); ++p) u[p] = label[static_cast<std::size_t>(t[p])];
        ts.push_back(std::move(u));
      }
      std::sort(ts.begin(), ts.end());
      key.push_back(static_cast<int>(ts.size()));
      for (const auto& t : ts) key.insert(key.end(), t.begin(), t.end());
    }
    if (best.empty() || key < best) best = std::move(key);
  };
  auto rec = [&](auto&& self, std::size_t b) -> void {
    if (b == blocks.size()) {
      for (std::size_t i = 0; i < order.size(); ++i) label[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
      encode();
      return;
    }
    auto first = order.begin() + static_cast<std::ptrdiff_t>(blocks[b].first);
    auto last = order.begin() + static_cast<std::ptrdiff_t>(blocks[b].second);
    std::sort(first, last);
    do {
      self(self, b + 1);
    } while (std::next_permutation(first, last));
  };
  rec(rec, 0);
  prefix.insert(prefix.end(), best.begin(), best.end());
  return prefix;
}

/// Every one-tuple deletion maps to the template and no vertex is isolated.
inline bool is_critical_obstruction(const Structure& c, const Structure& templ, const Limits& limits = {}) {
  HomOptions options;
  options.ignore_constants = true;
  if (has_homomorphism(c, templ, options, limits)) return false;
  std::vector<char> covered(static_cast<std::size_t>(c.size()), 0);
  for (std::size_t r = 0; r < c.relations().size(); ++r) {
    for (const auto& t : c.relation(r)) {
      for (Element e : t) covered[static_cast<std::size_t>(e)] = 1;
      Structure smaller = c;
      smaller.remove_tuple(r, t);
      if (!has_homomorphism(smaller, templ, options, limits)) return false;
    }
  }
  return std::all_of(covered.begin(), covered.end(), [](char x) { return x != 0; });
}

/// All critical obstructions with at most `max_vertices` vertices and
/// `max_tuples` tuples, up to isomorphism, ordered by tuple count, vertex
/// count and canonical form. Critical obstructions are connected and each
/// connected substructure of one maps to the template, so they are reached by
/// growing connected, still-mapping structures one tuple at a time.
inline std::vector<Obstruction> critical_obstructions(const Structure& a, ObstructionBounds bounds,
                                                      const Limits& limits = {}) {
  if (bounds.max_vertices < 1 || bounds.max_tuples < 1) throw InvalidInput("obstruction bounds must be positive");
  if (bounds.max_vertices > 8) throw BudgetExceeded("obstruction search limited to 8 vertices");
  const Signature sig = a.signature().relational_reduct();
  HomOptions options;
  options.ignore_constants = true;

  std::set<std::vector<int>> seen;
  std::vector<std::pair<std::vector<int>, Obstruction>> found;
  std::vector<Structure> frontier{Structure(sig, 1)};
  bool first_level = true;
  std::uint64_t explored = 0;

  for (int tuples = 1; tuples <= bounds.max_tuples && !frontier.empty(); ++tuples) {
    std::vector<Structure> next;
    for (const auto& s : frontier) {
      const int base = first_level ? 0 : s.size();
      for (std::size_t r = 0; r < sig.relations().size(); ++r) {
        const int k = sig.relations()[r].arity;
        // Entries are existing vertices or new ones introduced in order.
        Tuple t(static_cast<std::size_t>(k));
        auto rec = [&](auto&& self, int p, int fresh) -> void {
          if (p == k) {
            const bool touches = std::any_of(t.begin(), t.end(), [&](Element e) { return e < base; });
            if (!first_level && !touches) return;
            const int size = base + fresh;
            Structure grown(sig, size);
            for (std::size_t q = 0; q < s.relations().size(); ++q)
              if (!first_level)
                for (const auto& u : s.relation(q)) grown.add_tuple(q, u);
            if (grown.holds(r, t)) return;
            grown.add_tuple(r, t);
            if (++explored > limits.solutions) throw BudgetExceeded("obstruction enumeration exceeded budget");
            auto key = canonical_key(grown);
            if (!seen.insert(key).second) return;
            if (has_homomorphism(grown, a, options, limits)) {
              next.push_back(std::move(grown));
            } else if (is_critical_obstruction(grown, a, limits)) {
              Obstruction o{grown, true, grown.tuple_count()};
              found.emplace_back(std::move(key), std::move(o));
            }
            return;
          }
          for (int e = 0; e < base + fresh; ++e) {
            t[static_cast<std::size_t>(p)] = e;
            self(self, p + 1, fresh);
          }
          if (base + fresh < bounds.max_vertices) {
            t[static_cast<std::size_t>(p)] = base + fresh;
            self(self, p + 1, fresh + 1);
          }
        };
        rec(rec, 0, 0);
      }
    }
    first_level = false;
    frontier = std::move(next);
  }
  std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
    const auto kx = std::make_tuple(x.second.hyperedges, x.second.structure.size());
    const auto ky = std::make_tuple(y.second.hyperedges, y.second.structure.size());
    return kx != ky ? kx < ky : x.first < y.first;
  });
  std::vector<Obstruction> out;
  for (auto& f : found) out.push_back(std::move(f.second));
  return out;
}

/// "No obstruction of the set maps into the instance": the semantics of the
/// universal sentence emitted for that set.
inline bool excludes_all(const Structure& instance, const std::vector<Obstruction>& obstructions,
                         const Limits& limits = {}) {
  HomOptions options;
  options.ignore_constants = true;
  for (const auto& o : obstructions)
    if (has_homomorphism(o.structure, instance, options, limits)) return false;
  return true;
}

/// forall x . ~(canonical conjunction) for each obstruction, conjoined;
/// "true" for the empty set.
inline std::string universal_sentence(const std::vector<Obstruction>& obstructions) {
  if (obstructions.empty()) return "true";
  std::string out;
  for (const auto& o : obstructions) {
    const Formula q = canonical_query(o.structure);
    std::string vars, body;
    if (q.kind() == Formula::Kind::exists) {
      for (const auto& v : q.bound()) vars += (vars.empty() ? "" : " ") + v;
      body = q.body().to_string();
    } else {
      body = q.to_string();
    }
    if (!out.empty()) out += " & ";
    out += "(forall " + vars + " . ~(" + body + "))";
  }
  return out;
}

struct FoDefinabilityReport {
  /// Certified by a one-tolerant polymorphism.
  bool fo_definable = false;
  /// Largest one-tolerant arity tried.
  int arity_bound = 0;
  std::optional<OperationTable> tolerant_polymorphism;
  /// When fo-definable: the critical obstructions (at most arity - 1 tuples).
  std::vector<Obstruction> obstructions;
  /// Whether `obstructions` is provably the full critical set.
  bool obstruction_set_complete = false;
  std::string sentence;
  /// When not certified: the largest critical obstruction within bounds.
  std::optional<Obstruction> evidence;
  std::string verdict;
};

inline FoDefinabilityReport fo_definability_report(const Structure& a, int n_max, ObstructionBounds bounds = {},
                                                   const Limits& limits = {}) {
  if (n_max < 2) throw InvalidInput("n_max must be >= 2");
  FoDefinabilityReport out;
  out.arity_bound = n_max + 1;
  for (int m = 3; m <= n_max + 1 && !out.tolerant_polymorphism; ++m)
    out.tolerant_polymorphism = has_one_tolerant_polymorphism(a, m, limits);

  if (out.tolerant_polymorphism) {
    out.fo_definable = true;
    const int n = out.tolerant_polymorphism->arity() - 1;
    // A critical obstruction has at most n tuples, hence at most n * arity vertices.
    const int max_arity = std::max(1, a.signature().max_arity());
    const int needed = n * max_arity;
    ObstructionBounds full{std::min(needed, 7), n};
    out.obstruction_set_complete = needed <= 7;
    if (!a.signature().relations().empty()) out.obstructions = critical_obstructions(a, full, limits);
    out.sentence = universal_sentence(out.obstructions);
    out.verdict = "fo-definable (finite-template certificate: one-tolerant polymorphism of arity " +
                  std::to_string(n + 1) + ")";
    return out;
  }
  if (!a.signature().relations().empty()) {
    auto obs = critical_obstructions(a, bounds, limits);
    for (auto& o : obs)
      if (!out.evidence || o.hyperedges > out.evidence->hyperedges) out.evidence = o;
  }
  out.verdict = "no one-tolerant polymorphism up to arity " + std::to_string(n_max + 1) +
                " (bounded search; not a proof that CSP is not fo-definable)";
  return out;
}

}  // namespace polycsp
