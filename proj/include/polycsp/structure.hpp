#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polycsp/error.hpp"

namespace polycsp {

using Element = int;
using Tuple = std::vector<Element>;

struct RelationSymbol {
  std::string name;
  int arity = 0;

  auto operator<=>(const RelationSymbol&) const = default;
};

/// Relational signature with constants. Symbols are kept sorted by name so
/// that two signatures with the same symbols compare equal and index alike.
class Signature {
 public:
  Signature() = default;

  Signature(std::vector<RelationSymbol> relations, std::vector<std::string> constants = {})
      : relations_(std::move(relations)), constants_(std::move(constants)) {
    std::sort(relations_.begin(), relations_.end());
    std::sort(constants_.begin(), constants_.end());
    std::set<std::string_view> seen;
    for (const auto& r : relations_) {
      if (r.arity < 1) throw InvalidInput("relation '" + r.name + "' must have arity >= 1");
      if (r.name.empty()) throw InvalidInput("empty relation symbol");
      if (!seen.insert(r.name).second) throw InvalidInput("duplicate symbol '" + r.name + "'");
    }
    for (const auto& c : constants_) {
      if (c.empty()) throw InvalidInput("empty constant symbol");
      if (!seen.insert(c).second) throw InvalidInput("duplicate symbol '" + c + "'");
    }
  }

  const std::vector<RelationSymbol>& relations() const { return relations_; }
  const std::vector<std::string>& constants() const { return constants_; }

  std::optional<std::size_t> find_relation(std::string_view name) const {
    for (std::size_t i = 0; i < relations_.size(); ++i)
      if (relations_[i].name == name) return i;
    return std::nullopt;
  }

  std::optional<std::size_t> find_constant(std::string_view name) const {
    for (std::size_t i = 0; i < constants_.size(); ++i)
      if (constants_[i] == name) return i;
    return std::nullopt;
  }

  int max_arity() const {
    int m = 0;
    for (const auto& r : relations_) m = std::max(m, r.arity);
    return m;
  }

  /// The same relation symbols without constants.
  Signature relational_reduct() const { return Signature(relations_); }

  bool operator==(const Signature&) const = default;

 private:
  std::vector<RelationSymbol> relations_;
  std::vector<std::string> constants_;
};

/// A finite set of equal-length tuples, kept sorted and duplicate free.
class Relation {
 public:
  Relation() = default;
  explicit Relation(int arity) : arity_(arity) {}

  Relation(int arity, std::vector<Tuple> tuples) : arity_(arity), tuples_(std::move(tuples)) {
    for (const auto& t : tuples_)
      if (static_cast<int>(t.size()) != arity_)
        throw InvalidInput("tuple length " + std::to_string(t.size()) + " does not match arity " +
                           std::to_string(arity_));
    std::sort(tuples_.begin(), tuples_.end());
    tuples_.erase(std::unique(tuples_.begin(), tuples_.end()), tuples_.end());
  }

  int arity() const { return arity_; }
  std::size_t size() const { return tuples_.size(); }
  bool empty() const { return tuples_.empty(); }
  const std::vector<Tuple>& tuples() const { return tuples_; }
  auto begin() const { return tuples_.begin(); }
  auto end() const { return tuples_.end(); }

  bool contains(std::span<const Element> t) const {
    auto it = std::lower_bound(tuples_.begin(), tuples_.end(), t, [](const Tuple& a, std::span<const Element> b) {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    });
    return it != tuples_.end() && std::equal(it->begin(), it->end(), t.begin(), t.end());
  }

  void insert(Tuple t) {
    if (static_cast<int>(t.size()) != arity_) throw InvalidInput("tuple length does not match arity");
    auto it = std::lower_bound(tuples_.begin(), tuples_.end(), t);
    if (it == tuples_.end() || *it != t) tuples_.insert(it, std::move(t));
  }

  bool erase(const Tuple& t) {
    auto it = std::lower_bound(tuples_.begin(), tuples_.end(), t);
    if (it == tuples_.end() || *it != t) return false;
    tuples_.erase(it);
    return true;
  }

  bool operator==(const Relation&) const = default;

 private:
  int arity_ = 0;
  std::vector<Tuple> tuples_;
};

/// Finite relational structure with constants over the domain {0, ..., size-1}.
class Structure {
 public:
  Structure() = default;

  Structure(Signature signature, int size) : signature_(std::move(signature)), size_(size) {
    if (size_ < 1) throw InvalidInput("domain size must be >= 1");
    for (const auto& r : signature_.relations()) relations_.emplace_back(r.arity);
    constants_.assign(signature_.constants().size(), 0);
  }

  Structure(Signature signature, int size, std::vector<Relation> relations, std::vector<Element> constants)
      : signature_(std::move(signature)), size_(size), relations_(std::move(relations)),
        constants_(std::move(constants)) {
    if (size_ < 1) throw InvalidInput("domain size must be >= 1");
    if (relations_.size() != signature_.relations().size())
      throw InvalidInput("relation count does not match signature");
    if (constants_.size() != signature_.constants().size())
      throw InvalidInput("constant count does not match signature");
    for (std::size_t i = 0; i < relations_.size(); ++i) {
      if (relations_[i].arity() != signature_.relations()[i].arity)
        throw InvalidInput("relation '" + signature_.relations()[i].name + "' has wrong arity");
      for (const auto& t : relations_[i]) check_tuple(t);
    }
    for (Element c : constants_) check_element(c);
  }

  const Signature& signature() const { return signature_; }
  int size() const { return size_; }

  const Relation& relation(std::size_t i) const { return relations_.at(i); }
  const Relation& relation(std::string_view name) const { return relations_.at(relation_index(name)); }
  const std::vector<Relation>& relations() const { return relations_; }

  Element constant(std::size_t i) const { return constants_.at(i); }
  Element constant(std::string_view name) const {
    auto i = signature_.find_constant(name);
    if (!i) throw InvalidInput("unknown constant '" + std::string(name) + "'");
    return constants_[*i];
  }
  const std::vector<Element>& constants() const { return constants_; }

  std::size_t relation_index(std::string_view name) const {
    auto i = signature_.find_relation(name);
    if (!i) throw InvalidInput("unknown relation '" + std::string(name) + "'");
    return *i;
  }

  void add_tuple(std::size_t rel, Tuple t) {
    check_tuple(t);
    relations_.at(rel).insert(std::move(t));
  }
  void add_tuple(std::string_view rel, Tuple t) { add_tuple(relation_index(rel), std::move(t)); }

  bool remove_tuple(std::size_t rel, const Tuple& t) { return relations_.at(rel).erase(t); }

  void set_constant(std::size_t i, Element e) {
    check_element(e);
    constants_.at(i) = e;
  }
  void set_constant(std::string_view name, Element e) {
    auto i = signature_.find_constant(name);
    if (!i) throw InvalidInput("unknown constant '" + std::string(name) + "'");
    set_constant(*i, e);
  }

  bool holds(std::size_t rel, std::span<const Element> t) const { return relations_.at(rel).contains(t); }

  /// Total number of relation tuples ("hyperedges").
  std::size_t tuple_count() const {
    std::size_t n = 0;
    for (const auto& r : relations_) n += r.size();
    return n;
  }

  bool operator==(const Structure&) const = default;

 private:
  void check_element(Element e) const {
    if (e < 0 || e >= size_)
      throw InvalidInput("element " + std::to_string(e) + " outside domain of size " + std::to_string(size_));
  }
  void check_tuple(const Tuple& t) const {
    for (Element e : t) check_element(e);
  }

  Signature signature_;
  int size_ = 0;
  std::vector<Relation> relations_;
  std::vector<Element> constants_;
};

inline void require_same_signature(const Structure& a, const Structure& b) {
  if (a.signature() != b.signature()) throw SignatureMismatch("structures have different signatures");
}

/// Row-major index of a tuple over a domain of the given size.
inline std::size_t encode_tuple(std::span<const Element> t, int domain) {
  std::size_t code = 0;
  for (Element e : t) code = code * static_cast<std::size_t>(domain) + static_cast<std::size_t>(e);
  return code;
}

inline Tuple decode_tuple(std::size_t code, int domain, int length) {
  Tuple t(static_cast<std::size_t>(length));
  for (int i = length - 1; i >= 0; --i) {
    t[static_cast<std::size_t>(i)] = static_cast<Element>(code % static_cast<std::size_t>(domain));
    code /= static_cast<std::size_t>(domain);
  }
  return t;
}

/// Checked integer power, throwing when the result exceeds `cap`.
inline std::uint64_t checked_pow(std::uint64_t base, int exp, std::uint64_t cap, const char* what) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && r > cap / base) throw BudgetExceeded(std::string(what) + " exceeds budget");
    r *= base;
  }
  if (r > cap) throw BudgetExceeded(std::string(what) + " exceeds budget");
  return r;
}

/// Calls `visit(tuple)` for every tuple of A^length in row-major order.
template <class Visit>
void for_each_tuple(int domain, int length, Visit&& visit) {
  Tuple t(static_cast<std::size_t>(length), 0);
  while (true) {
    visit(static_cast<const Tuple&>(t));
    int i = length - 1;
    while (i >= 0 && t[static_cast<std::size_t>(i)] == domain - 1) t[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) return;
    ++t[static_cast<std::size_t>(i)];
  }
}

}  // namespace polycsp
