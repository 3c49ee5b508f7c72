#pragma once

#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "json.hpp"
#include "polycsp/duality.hpp"
#include "polycsp/galois.hpp"
#include "polycsp/structure_io.hpp"

namespace polycsp {

struct AnalysisOptions {
  /// Largest polymorphism arity counted and checked for essential unarity.
  int max_arity = 3;
  /// Largest tuple length for maximal pp-type counts.
  int types_n = 2;
  /// fo-definability tries one-tolerant arities 3 .. duality_n + 1.
  int duality_n = 3;
  ObstructionBounds bounds;
  ConstantHandling constants = ConstantHandling::with_constants;
  Limits limits;
};

/// Every verdict of `analyze`. A verdict is empty when its section failed;
/// the reason is then in `errors` under the section name. Certificates are
/// kept as JSON documents so that the report is a plain value.
struct AnalysisReport {
  std::string name;
  std::string file_hash;
  int domain_size = 0;
  int max_arity = 0;
  int types_n = 0;
  int duality_n = 0;

  std::optional<bool> core;
  /// {"non_embedding": [...]} when not a core, null otherwise.
  nlohmann::json core_certificate;
  std::optional<bool> epc;

  /// Number of k-ary polymorphisms for k = 1 .. max_arity.
  std::map<int, std::uint64_t> polymorphism_counts;

  std::optional<bool> essentially_unary;
  /// {"operation": {...}, "witness": {...}} for a non-essentially-unary polymorphism.
  nlohmann::json unarity_certificate;

  std::optional<bool> locally_refutable;
  /// {"diagonal": d} or {"sentence": "..."}.
  nlohmann::json refutability_certificate;

  bool np_hardness_flag = false;
  std::string np_hardness_note;

  /// Number of maximal pp-n-types for n = 1 .. types_n.
  std::map<int, std::uint64_t> maximal_pp_types;

  std::optional<bool> fo_definable;
  std::string fo_verdict;
  nlohmann::json fo_certificate;

  /// Section name -> error message.
  std::map<std::string, std::string> errors;

  bool operator==(const AnalysisReport&) const = default;
};

inline nlohmann::json witness_to_json(const EssentialityWitness& w) {
  return {{"x_coords", w.x_coords}, {"y_coords", w.y_coords}, {"x", w.x}, {"w", w.w}, {"w_prime", w.w_prime},
          {"y", w.y},               {"z", w.z},               {"z_prime", w.z_prime}};
}

namespace detail {

inline nlohmann::json optional_bool(const std::optional<bool>& b) {
  return b ? nlohmann::json(*b) : nlohmann::json(nullptr);
}

inline std::optional<bool> read_optional_bool(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<bool>();
}

inline nlohmann::json count_map(const std::map<int, std::uint64_t>& m) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : m) j[std::to_string(k)] = v;
  return j;
}

inline std::map<int, std::uint64_t> read_count_map(const nlohmann::json& j) {
  std::map<int, std::uint64_t> m;
  for (const auto& [k, v] : j.items()) m[std::stoi(k)] = v.get<std::uint64_t>();
  return m;
}

inline std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace detail

inline nlohmann::json report_to_json(const AnalysisReport& r) {
  using detail::optional_bool;
  return {
      {"template", {{"name", r.name}, {"hash", r.file_hash}, {"domain_size", r.domain_size}}},
      {"bounds", {{"max_arity", r.max_arity}, {"types_n", r.types_n}, {"duality_n", r.duality_n}}},
      {"core", {{"value", optional_bool(r.core)}, {"certificate", r.core_certificate}}},
      {"epc", {{"value", optional_bool(r.epc)}}},
      {"polymorphism_counts", detail::count_map(r.polymorphism_counts)},
      {"essentially_unary", {{"value", optional_bool(r.essentially_unary)}, {"certificate", r.unarity_certificate}}},
      {"local_refutability",
       {{"value", optional_bool(r.locally_refutable)}, {"certificate", r.refutability_certificate}}},
      {"np_hardness", {{"flag", r.np_hardness_flag}, {"note", r.np_hardness_note}}},
      {"maximal_pp_types", detail::count_map(r.maximal_pp_types)},
      {"fo_definability",
       {{"value", optional_bool(r.fo_definable)}, {"verdict", r.fo_verdict}, {"certificate", r.fo_certificate}}},
      {"errors", r.errors},
  };
}

inline AnalysisReport report_from_json(const nlohmann::json& j) {
  try {
    AnalysisReport r;
    const auto& t = j.at("template");
    r.name = t.at("name").get<std::string>();
    r.file_hash = t.at("hash").get<std::string>();
    r.domain_size = t.at("domain_size").get<int>();
    const auto& b = j.at("bounds");
    r.max_arity = b.at("max_arity").get<int>();
    r.types_n = b.at("types_n").get<int>();
    r.duality_n = b.at("duality_n").get<int>();
    r.core = detail::read_optional_bool(j.at("core").at("value"));
    r.core_certificate = j.at("core").at("certificate");
    r.epc = detail::read_optional_bool(j.at("epc").at("value"));
    r.polymorphism_counts = detail::read_count_map(j.at("polymorphism_counts"));
    r.essentially_unary = detail::read_optional_bool(j.at("essentially_unary").at("value"));
    r.unarity_certificate = j.at("essentially_unary").at("certificate");
    r.locally_refutable = detail::read_optional_bool(j.at("local_refutability").at("value"));
    r.refutability_certificate = j.at("local_refutability").at("certificate");
    r.np_hardness_flag = j.at("np_hardness").at("flag").get<bool>();
    r.np_hardness_note = j.at("np_hardness").at("note").get<std::string>();
    r.maximal_pp_types = detail::read_count_map(j.at("maximal_pp_types"));
    r.fo_definable = detail::read_optional_bool(j.at("fo_definability").at("value"));
    r.fo_verdict = j.at("fo_definability").at("verdict").get<std::string>();
    r.fo_certificate = j.at("fo_definability").at("certificate");
    r.errors = j.at("errors").get<std::map<std::string, std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report: ") + e.what(), 0, 0);
  }
}

inline nlohmann::json fo_report_to_json(const FoDefinabilityReport& fo) {
  nlohmann::json j;
  j["arity_bound"] = fo.arity_bound;
  j["tolerant_polymorphism"] =
      fo.tolerant_polymorphism ? operation_to_json(*fo.tolerant_polymorphism) : nlohmann::json(nullptr);
  nlohmann::json obs = nlohmann::json::array();
  for (const auto& o : fo.obstructions) obs.push_back(structure_to_json(o.structure));
  j["obstructions"] = obs;
  j["obstruction_set_complete"] = fo.obstruction_set_complete;
  j["sentence"] = fo.sentence;
  j["evidence"] = fo.evidence ? structure_to_json(fo.evidence->structure) : nlohmann::json(nullptr);
  return j;
}

/// Runs every pipeline on `a`. Failures (budget or otherwise) are confined
/// to their section and recorded in `errors`.
inline AnalysisReport analyze(const Structure& a, const std::string& name, const std::string& source_text,
                              const AnalysisOptions& opt = {}) {
  AnalysisReport r;
  r.name = name;
  r.file_hash = detail::hex64(fnv1a(source_text));
  r.domain_size = a.size();
  r.max_arity = opt.max_arity;
  r.types_n = opt.types_n;
  r.duality_n = opt.duality_n;

  auto section = [&](const std::string& key, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      r.errors[key] = e.what();
    }
  };

  section("core", [&] {
    const auto v = is_core(a, opt.limits);
    r.core = v.core;
    r.core_certificate = v.non_embedding ? nlohmann::json{{"non_embedding", v.non_embedding->map}} : nullptr;
    r.epc = v.core;
  });

  for (int k = 1; k <= opt.max_arity; ++k)
    section("polymorphism_counts." + std::to_string(k),
            [&] { r.polymorphism_counts[k] = count_polymorphisms(a, k, opt.limits); });

  section("essentially_unary", [&] {
    const auto v = all_polymorphisms_essentially_unary(a, opt.max_arity, opt.limits);
    r.essentially_unary = v.all_essentially_unary;
    if (v.counterexample)
      r.unarity_certificate = {{"operation", operation_to_json(*v.counterexample)},
                               {"witness", witness_to_json(*v.witness)}};
  });

  section("local_refutability", [&] {
    const auto v = is_locally_refutable(a, opt.constants);
    r.locally_refutable = v.refutable;
    if (v.diagonal) r.refutability_certificate = {{"diagonal", *v.diagonal}};
    if (v.counterexample) r.refutability_certificate = {{"sentence", v.counterexample->to_string()}};
  });

  r.np_hardness_flag = r.locally_refutable == false && r.essentially_unary == true;
  if (r.np_hardness_flag)
    r.np_hardness_note = "NP-hard flag raised: not locally refutable and all polymorphisms up to arity " +
                         std::to_string(opt.max_arity) + " are essentially unary (bounded evidence, not a proof)";
  else if (!r.locally_refutable || !r.essentially_unary)
    r.np_hardness_note = "not raised: a required sub-verdict is unavailable";
  else if (*r.locally_refutable)
    r.np_hardness_note = "not raised: locally refutable";
  else
    r.np_hardness_note = "not raised: a polymorphism of arity <= " + std::to_string(opt.max_arity) +
                         " is not essentially unary";

  for (int n = 1; n <= opt.types_n; ++n)
    section("maximal_pp_types." + std::to_string(n),
            [&] { r.maximal_pp_types[n] = count_maximal_pp_types(a, n, opt.limits).count(); });

  section("fo_definability", [&] {
    const auto fo = fo_definability_report(a, opt.duality_n, opt.bounds, opt.limits);
    r.fo_definable = fo.fo_definable;
    r.fo_verdict = fo.verdict;
    r.fo_certificate = fo_report_to_json(fo);
  });
  return r;
}

inline std::string report_to_text(const AnalysisReport& r) {
  std::ostringstream os;
  auto yes_no = [](const std::optional<bool>& b) -> std::string {
    if (!b) return "unavailable";
    return *b ? "yes" : "no";
  };
  os << "template " << (r.name.empty() ? "(unnamed)" : r.name) << " [hash " << r.file_hash << ", "
     << r.domain_size << " elements]\n";
  os << "core: " << yes_no(r.core);
  if (r.core_certificate.is_object()) os << " (non-embedding endomorphism " << r.core_certificate["non_embedding"].dump() << ")";
  os << "\nepc (finite: equals core): " << yes_no(r.epc) << "\n";
  os << "polymorphism counts:";
  for (const auto& [k, n] : r.polymorphism_counts) os << " arity " << k << ": " << n << ";";
  os << "\nall polymorphisms up to arity " << r.max_arity << " essentially unary: " << yes_no(r.essentially_unary);
  if (r.unarity_certificate.is_object())
    os << " (counterexample values " << r.unarity_certificate["operation"]["values"].dump() << ")";
  os << "\nlocally refutable: " << yes_no(r.locally_refutable);
  if (r.refutability_certificate.is_object()) os << " " << r.refutability_certificate.dump();
  os << "\n" << r.np_hardness_note << "\n";
  os << "maximal pp-types:";
  for (const auto& [n, c] : r.maximal_pp_types) os << " n=" << n << ": " << c << ";";
  os << "\nfo-definable: " << yes_no(r.fo_definable) << " - " << r.fo_verdict << "\n";
  if (r.fo_certificate.is_object() && !r.fo_certificate["sentence"].get<std::string>().empty())
    os << "  sentence: " << r.fo_certificate["sentence"].get<std::string>() << "\n";
  for (const auto& [s, e] : r.errors) os << "error in " << s << ": " << e << "\n";
  return os.str();
}

}  // namespace polycsp
