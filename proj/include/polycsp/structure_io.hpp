#pragma once

// JSON encoding of structures and standalone relations.
//
//   structure := {
//     "name":      string                        (optional)
//     "signature": { "relations": { NAME: ARITY, ... },
//                    "constants": [ NAME, ... ] }  ("constants" optional)
//     "domain":    integer >= 1
//     "relations": { NAME: [ [e, ...], ... ], ... }  (missing names are empty)
//     "constants": { NAME: e, ... }                 (every constant required)
//   }
//   relation  := { "arity": integer >= 1, "tuples": [ [e, ...], ... ] }
//              | [ [e, ...], ... ]                   (non-empty; arity inferred)
//
// Unknown keys are rejected at every level.

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "polycsp/structure.hpp"

namespace polycsp {

using json = nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object", 0, 0);
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ParseError(where + ": unknown field '" + key + "'", 0, 0);
  }
}

inline int as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ParseError(where + ": expected an integer", 0, 0);
  const auto x = v.get<std::int64_t>();
  if (x < INT32_MIN || x > INT32_MAX) throw ParseError(where + ": integer out of range", 0, 0);
  return static_cast<int>(x);
}

inline Tuple as_tuple(const json& v, const std::string& where) {
  if (!v.is_array()) throw ParseError(where + ": expected a tuple array", 0, 0);
  Tuple t;
  for (const auto& e : v) t.push_back(as_int(e, where));
  return t;
}

/// Parses text, translating byte offsets of syntax errors to line:column.
inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(std::string("malformed JSON: ") + e.what(), line, col);
  }
}

}  // namespace detail

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

inline Structure structure_from_json_unchecked(const json& doc) {
  using detail::as_int;
  detail::reject_unknown_keys(doc, {"name", "signature", "domain", "relations", "constants"}, "structure");
  if (!doc.contains("signature") || !doc.contains("domain"))
    throw ParseError("structure: 'signature' and 'domain' are required", 0, 0);

  const json& sig = doc["signature"];
  detail::reject_unknown_keys(sig, {"relations", "constants"}, "signature");
  std::vector<RelationSymbol> symbols;
  std::vector<std::string> constant_names;
  if (sig.contains("relations")) {
    if (!sig["relations"].is_object()) throw ParseError("signature.relations: expected an object", 0, 0);
    for (const auto& [name, arity] : sig["relations"].items())
      symbols.push_back({name, as_int(arity, "signature.relations." + name)});
  }
  if (sig.contains("constants")) {
    if (!sig["constants"].is_array()) throw ParseError("signature.constants: expected an array", 0, 0);
    for (const auto& c : sig["constants"]) {
      if (!c.is_string()) throw ParseError("signature.constants: expected strings", 0, 0);
      constant_names.push_back(c.get<std::string>());
    }
  }

  Structure s(Signature(std::move(symbols), std::move(constant_names)), as_int(doc["domain"], "domain"));

  if (doc.contains("relations")) {
    if (!doc["relations"].is_object()) throw ParseError("relations: expected an object", 0, 0);
    for (const auto& [name, tuples] : doc["relations"].items()) {
      if (!s.signature().find_relation(name)) throw ParseError("relations: '" + name + "' not in signature", 0, 0);
      if (!tuples.is_array()) throw ParseError("relations." + name + ": expected an array", 0, 0);
      for (const auto& t : tuples) {
        Tuple tup = detail::as_tuple(t, "relations." + name);
        const auto r = s.relation_index(name);
        if (static_cast<int>(tup.size()) != s.signature().relations()[r].arity)
          throw ParseError("relations." + name + ": tuple has wrong arity", 0, 0);
        s.add_tuple(r, std::move(tup));
      }
    }
  }

  std::set<std::string> assigned;
  if (doc.contains("constants")) {
    if (!doc["constants"].is_object()) throw ParseError("constants: expected an object", 0, 0);
    for (const auto& [name, value] : doc["constants"].items()) {
      if (!s.signature().find_constant(name)) throw ParseError("constants: '" + name + "' not in signature", 0, 0);
      s.set_constant(name, as_int(value, "constants." + name));
      assigned.insert(name);
    }
  }
  for (const auto& c : s.signature().constants())
    if (!assigned.count(c)) throw ParseError("constants: no value for '" + c + "'", 0, 0);
  return s;
}

}  // namespace detail

inline Structure structure_from_json(const json& doc) {
  try {
    return detail::structure_from_json_unchecked(doc);
  } catch (const InvalidInput& e) {
    throw ParseError(std::string("structure: ") + e.what(), 0, 0);
  }
}

inline json structure_to_json(const Structure& s, const std::string& name = {}) {
  json doc = json::object();
  if (!name.empty()) doc["name"] = name;
  json rels = json::object();
  for (const auto& r : s.signature().relations()) rels[r.name] = r.arity;
  doc["signature"] = {{"relations", rels}, {"constants", s.signature().constants()}};
  doc["domain"] = s.size();
  json tuples = json::object();
  for (std::size_t r = 0; r < s.relations().size(); ++r)
    tuples[s.signature().relations()[r].name] = s.relation(r).tuples();
  doc["relations"] = tuples;
  json consts = json::object();
  for (std::size_t c = 0; c < s.constants().size(); ++c) consts[s.signature().constants()[c]] = s.constant(c);
  doc["constants"] = consts;
  return doc;
}

inline Structure parse_structure(const std::string& text) {
  return structure_from_json(detail::parse_json_text(text));
}

inline Structure load_structure(const std::string& path) { return parse_structure(read_text_file(path)); }

inline Relation relation_from_json(const json& doc) {
  if (doc.is_array()) {
    if (doc.empty()) throw ParseError("relation: empty tuple list needs an explicit arity", 0, 0);
    std::vector<Tuple> tuples;
    for (const auto& t : doc) tuples.push_back(detail::as_tuple(t, "relation"));
    const int arity = static_cast<int>(tuples.front().size());
    if (arity < 1) throw ParseError("relation: arity must be >= 1", 0, 0);
    try {
      return Relation(arity, std::move(tuples));
    } catch (const InvalidInput& e) {
      throw ParseError(std::string("relation: ") + e.what(), 0, 0);
    }
  }
  detail::reject_unknown_keys(doc, {"arity", "tuples"}, "relation");
  if (!doc.contains("arity") || !doc.contains("tuples"))
    throw ParseError("relation: 'arity' and 'tuples' are required", 0, 0);
  const int arity = detail::as_int(doc["arity"], "relation.arity");
  if (arity < 1) throw ParseError("relation: arity must be >= 1", 0, 0);
  if (!doc["tuples"].is_array()) throw ParseError("relation.tuples: expected an array", 0, 0);
  std::vector<Tuple> tuples;
  for (const auto& t : doc["tuples"]) tuples.push_back(detail::as_tuple(t, "relation.tuples"));
  try {
    return Relation(arity, std::move(tuples));
  } catch (const InvalidInput& e) {
    throw ParseError(std::string("relation: ") + e.what(), 0, 0);
  }
}

inline json relation_to_json(const Relation& r) { return {{"arity", r.arity()}, {"tuples", r.tuples()}}; }

inline Relation parse_relation(const std::string& text) { return relation_from_json(detail::parse_json_text(text)); }

/// 64-bit FNV-1a; used as a stable content hash in reports.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace polycsp
