#pragma once

#include <numeric>
#include <vector>

#include "polycsp/homomorphism.hpp"

namespace polycsp {

/// Direct product. The pair (i, j) is encoded as i * |B| + j; a tuple holds
/// iff both projections hold; constants are pairs of constants.
inline Structure product(const Structure& a, const Structure& b, const Limits& limits = {}) {
  require_same_signature(a, b);
  const std::uint64_t n =
      static_cast<std::uint64_t>(a.size()) * static_cast<std::uint64_t>(b.size());
  if (n > limits.power_elements) throw BudgetExceeded("product domain exceeds budget");
  const int nb = b.size();
  std::vector<Relation> rels;
  for (std::size_t r = 0; r < a.relations().size(); ++r) {
    const int k = a.signature().relations()[r].arity;
    if (static_cast<std::uint64_t>(a.relation(r).size()) * b.relation(r).size() > limits.power_tuples)
      throw BudgetExceeded("product relation exceeds budget");
    std::vector<Tuple> tuples;
    tuples.reserve(a.relation(r).size() * b.relation(r).size());
    for (const auto& ta : a.relation(r)) {
      for (const auto& tb : b.relation(r)) {
        Tuple t(static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = ta[i] * nb + tb[i];
        tuples.push_back(std::move(t));
      }
    }
    rels.emplace_back(k, std::move(tuples));
  }
  std::vector<Element> consts;
  for (std::size_t c = 0; c < a.constants().size(); ++c) consts.push_back(a.constant(c) * nb + b.constant(c));
  return Structure(a.signature(), static_cast<int>(n), std::move(rels), std::move(consts));
}

/// k-th direct power; element (x_1, ..., x_k) is encoded row-major, so that
/// power(a, 1) == a and power(a, k) == product(power(a, k - 1), a).
inline Structure power(const Structure& a, int k, const Limits& limits = {}) {
  if (k < 1) throw InvalidInput("power exponent must be >= 1");
  checked_pow(static_cast<std::uint64_t>(a.size()), k, limits.power_elements, "power domain");
  for (const auto& r : a.relations())
    checked_pow(r.size(), k, limits.power_tuples, "power relation");
  Structure result = a;
  for (int i = 1; i < k; ++i) result = product(result, a, limits);
  return result;
}

/// One-tolerant n-th power: domain A^n (row-major), a k-ary R holds of a
/// tuple of elements when the coordinate tuples lie in R^A in at least n - 1
/// of the n coordinates. Constants become diagonal elements.
inline Structure one_tolerant_power(const Structure& a, int n, const Limits& limits = {}) {
  if (n < 1) throw InvalidInput("one-tolerant power exponent must be >= 1");
  const std::uint64_t size = checked_pow(static_cast<std::uint64_t>(a.size()), n, limits.power_elements,
                                         "one-tolerant power domain");
  const int dom = a.size();
  std::vector<Relation> rels;
  for (std::size_t r = 0; r < a.relations().size(); ++r) {
    const int k = a.signature().relations()[r].arity;
    const Relation& rel = a.relation(r);
    std::vector<Tuple> bad;
    for_each_tuple(dom, k, [&](const Tuple& t) {
      if (!rel.contains(t)) bad.push_back(t);
    });
    const std::uint64_t good_n = checked_pow(rel.size(), n, limits.power_tuples, "one-tolerant relation");
    const std::uint64_t mixed =
        rel.empty() ? 0 : checked_pow(rel.size(), n - 1, limits.power_tuples, "one-tolerant relation");
    if (good_n + static_cast<std::uint64_t>(n) * bad.size() * mixed > limits.power_tuples)
      throw BudgetExceeded("one-tolerant relation exceeds budget");

    std::vector<Tuple> tuples;
    // choice[j] picks the coordinate tuple used in coordinate j.
    auto emit = [&](const std::vector<const Tuple*>& choice) {
      Tuple t(static_cast<std::size_t>(k), 0);
      for (int i = 0; i < k; ++i) {
        std::size_t code = 0;
        for (int j = 0; j < n; ++j)
          code = code * static_cast<std::size_t>(dom) +
                 static_cast<std::size_t>((*choice[static_cast<std::size_t>(j)])[static_cast<std::size_t>(i)]);
        t[static_cast<std::size_t>(i)] = static_cast<Element>(code);
      }
      tuples.push_back(std::move(t));
    };
    std::vector<const Tuple*> choice(static_cast<std::size_t>(n));
    // free_coord == -1: all coordinates in R; otherwise that coordinate takes a non-R tuple.
    for (int free_coord = -1; free_coord < n; ++free_coord) {
      if (free_coord >= 0 && bad.empty()) break;
      auto recurse = [&](auto&& self, int j) -> void {
        if (j == n) {
          emit(choice);
          return;
        }
        const auto& pool = (j == free_coord) ? bad : rel.tuples();
        for (const auto& t : pool) {
          choice[static_cast<std::size_t>(j)] = &t;
          self(self, j + 1);
        }
      };
      recurse(recurse, 0);
    }
    rels.emplace_back(k, std::move(tuples));
  }
  std::vector<Element> consts;
  for (Element c : a.constants()) {
    std::size_t code = 0;
    for (int j = 0; j < n; ++j) code = code * static_cast<std::size_t>(dom) + static_cast<std::size_t>(c);
    consts.push_back(static_cast<Element>(code));
  }
  return Structure(a.signature(), static_cast<int>(size), std::move(rels), std::move(consts));
}

/// Direct limit of a finite chain A_0 -> A_1 -> ... -> A_m. Elements of the
/// disjoint union are identified when their images eventually coincide; a
/// relation holds of classes when it holds of representatives in some A_i.
/// Every class contains exactly one element of A_m, and classes are numbered
/// by that element, so the result coincides with A_m.
inline Structure direct_limit(const std::vector<Structure>& chain, const std::vector<Homomorphism>& homs) {
  if (chain.empty()) throw InvalidInput("direct limit of an empty chain");
  if (homs.size() + 1 != chain.size()) throw InvalidInput("non-composing chain: need one map per link");
  for (std::size_t i = 0; i < homs.size(); ++i) {
    require_same_signature(chain[i], chain[i + 1]);
    if (!is_homomorphism(chain[i], chain[i + 1], homs[i].map))
      throw InvalidInput("non-composing chain: link " + std::to_string(i) + " is not a homomorphism");
  }

  // Union-find over the disjoint union; offset[i] is where A_i starts.
  std::vector<std::size_t> offset(chain.size() + 1, 0);
  for (std::size_t i = 0; i < chain.size(); ++i) offset[i + 1] = offset[i] + static_cast<std::size_t>(chain[i].size());
  std::vector<std::size_t> parent(offset.back());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < homs.size(); ++i)
    for (int e = 0; e < chain[i].size(); ++e)
      parent[find(offset[i] + static_cast<std::size_t>(e))] =
          find(offset[i + 1] + static_cast<std::size_t>(homs[i](e)));

  const Structure& last = chain.back();
  std::vector<Element> class_id(offset.back(), -1);
  for (int e = 0; e < last.size(); ++e) class_id[find(offset[chain.size() - 1] + static_cast<std::size_t>(e))] = e;

  Structure limit(last.signature(), last.size());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    auto cls = [&](Element e) { return class_id[find(offset[i] + static_cast<std::size_t>(e))]; };
    for (std::size_t r = 0; r < chain[i].relations().size(); ++r) {
      for (const auto& t : chain[i].relation(r)) {
        Tuple image(t.size());
        for (std::size_t p = 0; p < t.size(); ++p) image[p] = cls(t[p]);
        limit.add_tuple(r, std::move(image));
      }
    }
    for (std::size_t c = 0; c < chain[i].constants().size(); ++c) limit.set_constant(c, cls(chain[i].constant(c)));
  }
  return limit;
}

}  // namespace polycsp
