#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "polycsp/structure.hpp"

namespace polycsp {

/// A map from the domain of a source structure to the domain of a target
/// structure, stored as an element array indexed by source element.
struct Homomorphism {
  std::vector<Element> map;

  Element operator()(Element e) const { return map.at(static_cast<std::size_t>(e)); }
  auto operator<=>(const Homomorphism&) const = default;
};

struct HomOptions {
  /// Source element -> required target element.
  std::vector<std::pair<Element, Element>> pins;
  /// Only injective maps.
  bool injective = false;
  /// Compare and respect only the relational reducts of both structures.
  bool ignore_constants = false;
};

/// Exhaustive check that `map` preserves every relation tuple and constant.
inline bool is_homomorphism(const Structure& a, const Structure& b, const std::vector<Element>& map,
                            bool ignore_constants = false) {
  if (a.signature().relations() != b.signature().relations()) return false;
  if (!ignore_constants && a.signature().constants() != b.signature().constants()) return false;
  if (map.size() != static_cast<std::size_t>(a.size())) return false;
  for (Element e : map)
    if (e < 0 || e >= b.size()) return false;
  Tuple image;
  for (std::size_t r = 0; r < a.relations().size(); ++r) {
    for (const auto& t : a.relation(r)) {
      image.resize(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) image[i] = map[static_cast<std::size_t>(t[i])];
      if (!b.holds(r, image)) return false;
    }
  }
  if (!ignore_constants)
    for (std::size_t c = 0; c < a.constants().size(); ++c)
      if (map[static_cast<std::size_t>(a.constant(c))] != b.constant(c)) return false;
  return true;
}

/// Injective homomorphism that also reflects every relation.
inline bool is_embedding(const Structure& a, const Structure& b, const std::vector<Element>& map) {
  if (!is_homomorphism(a, b, map)) return false;
  std::vector<char> used(static_cast<std::size_t>(b.size()), 0);
  for (Element e : map) {
    if (used[static_cast<std::size_t>(e)]) return false;
    used[static_cast<std::size_t>(e)] = 1;
  }
  for (std::size_t r = 0; r < a.relations().size(); ++r) {
    const int k = a.signature().relations()[r].arity;
    bool reflects = true;
    Tuple image(static_cast<std::size_t>(k));
    for_each_tuple(a.size(), k, [&](const Tuple& t) {
      if (!reflects) return;
      for (std::size_t i = 0; i < t.size(); ++i) image[i] = map[static_cast<std::size_t>(t[i])];
      if (b.holds(r, image) && !a.holds(r, t)) reflects = false;
    });
    if (!reflects) return false;
  }
  return true;
}

namespace detail {

/// Backtracking homomorphism search. Variables are source elements taken in
/// ascending order, values are tried in ascending order, and every node runs
/// generalized arc consistency over the relation tuples of the source. Since
/// propagation never removes a value that occurs in a solution, solutions are
/// produced in lexicographic order.
class HomSearch {
 public:
  HomSearch(const Structure& source, const Structure& target, const HomOptions& options, const Limits& limits)
      : nvars_(source.size()), ndom_(target.size()), words_((target.size() + 63) / 64), options_(options),
        limits_(limits) {
    if (source.signature().relations() != target.signature().relations() ||
        (!options.ignore_constants && source.signature().constants() != target.signature().constants()))
      throw SignatureMismatch("homomorphism search between structures of different signatures");

    dom_.assign(static_cast<std::size_t>(nvars_) * words_, 0);
    for (int v = 0; v < nvars_; ++v)
      for (int d = 0; d < ndom_; ++d) set_bit(v, d);

    watchers_.resize(static_cast<std::size_t>(nvars_));
    for (std::size_t r = 0; r < source.relations().size(); ++r) {
      for (const auto& t : source.relation(r)) {
        Constraint c;
        c.scope = t;
        c.table = &target.relation(r);
        for (std::size_t p = 0; p < t.size(); ++p)
          for (std::size_t q = p + 1; q < t.size(); ++q)
            if (t[p] == t[q]) c.repeats.emplace_back(p, q);
        const int id = static_cast<int>(constraints_.size());
        constraints_.push_back(std::move(c));
        for (Element v : t) {
          auto& w = watchers_[static_cast<std::size_t>(v)];
          if (w.empty() || w.back() != id) w.push_back(id);
        }
      }
    }

    if (!options.ignore_constants)
      for (std::size_t c = 0; c < source.constants().size(); ++c)
        restrict_to(source.constant(c), target.constant(c));
    for (auto [v, d] : options.pins) {
      if (v < 0 || v >= nvars_ || d < 0 || d >= ndom_) throw InvalidInput("pin outside domain");
      restrict_to(v, d);
    }
    support_.assign(words_ * static_cast<std::size_t>(target.signature().max_arity() + 1), 0);
    in_queue_.assign(constraints_.size(), 0);
  }

  /// Calls `visit(map)` for each solution in lexicographic order until it returns false.
  template <class Visit>
  void run(Visit&& visit) {
    if (failed_) return;
    for (std::size_t c = 0; c < constraints_.size(); ++c) enqueue(static_cast<int>(c));
    if (!propagate()) return;
    snapshots_.assign(static_cast<std::size_t>(nvars_) + 1, {});
    map_.assign(static_cast<std::size_t>(nvars_), 0);
    dfs(0, visit);
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  struct Constraint {
    Tuple scope;
    const Relation* table = nullptr;
    std::vector<std::pair<std::size_t, std::size_t>> repeats;
  };

  std::uint64_t* row(int v) { return dom_.data() + static_cast<std::size_t>(v) * words_; }
  bool has_bit(int v, int d) const {
    return (dom_[static_cast<std::size_t>(v) * words_ + static_cast<std::size_t>(d) / 64] >> (d % 64)) & 1u;
  }
  void set_bit(int v, int d) { row(v)[d / 64] |= std::uint64_t{1} << (d % 64); }

  bool empty_row(int v) {
    const auto* w = row(v);
    for (std::size_t i = 0; i < words_; ++i)
      if (w[i]) return false;
    return true;
  }

  void restrict_to(int v, int d) {
    if (!has_bit(v, d)) {
      failed_ = true;
      return;
    }
    auto* w = row(v);
    for (std::size_t i = 0; i < words_; ++i) w[i] = 0;
    set_bit(v, d);
  }

  void enqueue(int c) {
    if (!in_queue_[static_cast<std::size_t>(c)]) {
      in_queue_[static_cast<std::size_t>(c)] = 1;
      queue_.push_back(c);
    }
  }

  void touch(int v, int except) {
    for (int c : watchers_[static_cast<std::size_t>(v)])
      if (c != except) enqueue(c);
  }

  bool revise(int cid) {
    const Constraint& c = constraints_[static_cast<std::size_t>(cid)];
    const std::size_t k = c.scope.size();
    std::fill(support_.begin(), support_.begin() + static_cast<std::ptrdiff_t>(k * words_), 0);
    for (const auto& t : *c.table) {
      bool ok = true;
      for (std::size_t p = 0; p < k && ok; ++p) ok = has_bit(c.scope[p], t[p]);
      for (std::size_t i = 0; i < c.repeats.size() && ok; ++i)
        ok = t[c.repeats[i].first] == t[c.repeats[i].second];
      if (!ok) continue;
      for (std::size_t p = 0; p < k; ++p)
        support_[p * words_ + static_cast<std::size_t>(t[p]) / 64] |= std::uint64_t{1} << (t[p] % 64);
    }
    for (std::size_t p = 0; p < k; ++p) {
      const int v = c.scope[p];
      auto* w = row(v);
      bool changed = false;
      for (std::size_t i = 0; i < words_; ++i) {
        const std::uint64_t next = w[i] & support_[p * words_ + i];
        if (next != w[i]) {
          w[i] = next;
          changed = true;
        }
      }
      if (changed) {
        if (empty_row(v)) return false;
        touch(v, cid);
      }
    }
    return true;
  }

  bool propagate() {
    bool ok = true;
    std::size_t head = 0;
    while (head < queue_.size()) {
      const int c = queue_[head++];
      in_queue_[static_cast<std::size_t>(c)] = 0;
      if (ok && !revise(c)) ok = false;
    }
    queue_.clear();
    return ok;
  }

  template <class Visit>
  bool dfs(int v, Visit& visit) {
    if (v == nvars_) return visit(static_cast<const std::vector<Element>&>(map_));
    auto& saved = snapshots_[static_cast<std::size_t>(v)];
    saved = dom_;
    for (int d = 0; d < ndom_; ++d) {
      if (!((saved[static_cast<std::size_t>(v) * words_ + static_cast<std::size_t>(d) / 64] >> (d % 64)) & 1u))
        continue;
      if (++nodes_ > limits_.search_nodes)
        throw BudgetExceeded("homomorphism search exceeded " + std::to_string(limits_.search_nodes) + " nodes");
      dom_ = saved;
      restrict_to(v, d);
      bool ok = true;
      if (options_.injective) {
        for (int u = v + 1; u < nvars_ && ok; ++u) {
          if (!has_bit(u, d)) continue;
          row(u)[d / 64] &= ~(std::uint64_t{1} << (d % 64));
          if (empty_row(u)) ok = false;
          touch(u, -1);
        }
      }
      touch(v, -1);
      ok = propagate() && ok;
      if (ok) {
        map_[static_cast<std::size_t>(v)] = d;
        if (!dfs(v + 1, visit)) return false;
      }
    }
    dom_ = saved;
    return true;
  }

  int nvars_;
  int ndom_;
  std::size_t words_;
  HomOptions options_;
  Limits limits_;
  bool failed_ = false;
  std::uint64_t nodes_ = 0;
  std::vector<std::uint64_t> dom_;
  std::vector<std::uint64_t> support_;
  std::vector<Constraint> constraints_;
  std::vector<std::vector<int>> watchers_;
  std::vector<int> queue_;
  std::vector<char> in_queue_;
  std::vector<std::vector<std::uint64_t>> snapshots_;
  std::vector<Element> map_;
};

}  // namespace detail

/// Calls `visit(const std::vector<Element>&)` for every homomorphism a -> b in
/// lexicographic order; stops early when `visit` returns false.
template <class Visit>
void for_each_homomorphism(const Structure& a, const Structure& b, Visit&& visit, const HomOptions& options = {},
                           const Limits& limits = {}) {
  detail::HomSearch search(a, b, options, limits);
  search.run(visit);
}

/// Lexicographically least homomorphism a -> b, if any.
inline std::optional<Homomorphism> find_homomorphism(const Structure& a, const Structure& b,
                                                     const HomOptions& options = {}, const Limits& limits = {}) {
  std::optional<Homomorphism> found;
  for_each_homomorphism(
      a, b,
      [&](const std::vector<Element>& m) {
        found = Homomorphism{m};
        return false;
      },
      options, limits);
  if (found && !is_homomorphism(a, b, found->map, options.ignore_constants))
    throw std::logic_error("homomorphism search produced an invalid map");
  return found;
}

/// All homomorphisms a -> b in lexicographic order.
inline std::vector<Homomorphism> enumerate_homomorphisms(const Structure& a, const Structure& b,
                                                         const HomOptions& options = {}, const Limits& limits = {}) {
  std::vector<Homomorphism> out;
  for_each_homomorphism(
      a, b,
      [&](const std::vector<Element>& m) {
        if (out.size() >= limits.solutions)
          throw BudgetExceeded("more than " + std::to_string(limits.solutions) + " homomorphisms");
        out.push_back(Homomorphism{m});
        return true;
      },
      options, limits);
  return out;
}

inline bool has_homomorphism(const Structure& a, const Structure& b, const HomOptions& options = {},
                             const Limits& limits = {}) {
  return find_homomorphism(a, b, options, limits).has_value();
}

/// An isomorphism a -> b, if one exists.
inline std::optional<Homomorphism> find_isomorphism(const Structure& a, const Structure& b,
                                                    const Limits& limits = {}) {
  if (a.signature() != b.signature() || a.size() != b.size()) return std::nullopt;
  for (std::size_t r = 0; r < a.relations().size(); ++r)
    if (a.relation(r).size() != b.relation(r).size()) return std::nullopt;
  // An injective homomorphism between equal-size structures with equal tuple
  // counts is onto on elements and on every relation, hence an isomorphism.
  HomOptions options;
  options.injective = true;
  return find_homomorphism(a, b, options, limits);
}

inline bool are_isomorphic(const Structure& a, const Structure& b, const Limits& limits = {}) {
  return find_isomorphism(a, b, limits).has_value();
}

}  // namespace polycsp
