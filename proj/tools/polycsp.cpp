// Command-line front end. Every command reads the shared file formats and
// prints either human-readable text or a JSON document (--format machine).
//
// Exit codes:
//   analyze, types, rewrite-ep   0 done, 2 error
//   solve                        0 sat, 1 unsat, 2 error
//   ppdef                        0 definable, 1 not definable, 2 error
//   duality                      0 fo-definable, 1 bounded negative, 2 error
//   horn classify                0 Horn, 1 not Horn, 2 error
//   horn solve                   0 sat, 1 unsat, 2 error

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>

#include "polycsp/clones.hpp"
#include "polycsp/cnf_io.hpp"
#include "polycsp/disjunction_elimination.hpp"
#include "polycsp/duality.hpp"
#include "polycsp/evaluation.hpp"
#include "polycsp/formula_parser.hpp"
#include "polycsp/galois.hpp"
#include "polycsp/linear_horn.hpp"
#include "polycsp/report.hpp"
#include "polycsp/structure_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace polycsp;

namespace {

struct Common {
  std::string format = "text";
  Limits limits;
  bool machine() const { return format == "machine"; }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "machine"}))->capture_default_str();
  cmd->add_option("--search-nodes", c.limits.search_nodes, "Node budget of a single homomorphism search")
      ->capture_default_str();
  cmd->add_option("--solutions", c.limits.solutions, "Solutions collected by a single enumeration")
      ->capture_default_str();
  cmd->add_option("--power-elements", c.limits.power_elements, "Largest materialized power")->capture_default_str();
  cmd->add_option("--power-tuples", c.limits.power_tuples, "Largest relation of a materialized power")
      ->capture_default_str();
  cmd->add_option("--closure-elements", c.limits.closure_elements, "Largest indicator power used by pp-closure")
      ->capture_default_str();
}

struct Loaded {
  Structure structure;
  std::string name;
  std::string text;
};

Loaded load(const std::string& path) {
  Loaded l{Structure(), fs::path(path).stem().string(), read_text_file(path)};
  const json doc = detail::parse_json_text(l.text);
  l.structure = structure_from_json(doc);
  if (doc.is_object() && doc.contains("name") && doc["name"].is_string() && !doc["name"].get<std::string>().empty())
    l.name = doc["name"].get<std::string>();
  return l;
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

json assignment_to_json(const Assignment& a) {
  json j = json::object();
  for (const auto& [v, e] : a) j[v] = e;
  return j;
}

json point_to_json(const RationalPoint& p) {
  json j = json::object();
  for (const auto& [v, x] : p) j[v] = to_string(x);
  return j;
}

json clause_list(const LinearCnf& f) {
  json j = json::array();
  for (const auto& c : f.clauses()) j.push_back(to_text(c));
  return j;
}

// ------------------------------------------------------------------ analyze

int cmd_analyze(const Common& c, const std::string& file, AnalysisOptions opt) {
  const auto l = load(file);
  opt.limits = c.limits;
  const auto report = analyze(l.structure, l.name, l.text, opt);
  if (c.machine())
    print(report_to_json(report));
  else
    std::cout << report_to_text(report);
  return 0;
}

// -------------------------------------------------------------------- solve

int cmd_solve(const Common& c, const std::string& file, const std::string& sentence_file, bool via_p4,
              const std::string& p4) {
  const auto l = load(file);
  const Formula f = parse_formula(read_text_file(sentence_file), l.structure.signature());
  if (!f.free_variables().empty()) throw InvalidInput("the input must be a sentence (it has free variables)");
  Formula used = f;
  if (via_p4) used = eliminate_disjunctions(f, p4, l.structure, c.limits);
  const auto witness = satisfying_assignment(l.structure, used, {}, c.limits);
  if (c.machine()) {
    json j{{"result", witness ? "sat" : "unsat"}, {"via_p4", via_p4}};
    if (via_p4) j["rewritten"] = used.to_string();
    j["assignment"] = witness ? assignment_to_json(*witness) : json(nullptr);
    print(j);
  } else {
    if (via_p4) std::cout << "rewritten: " << used.to_string() << "\n";
    std::cout << (witness ? "sat" : "unsat") << "\n";
    if (witness)
      for (const auto& [v, e] : *witness) std::cout << "  " << v << " = " << e << "\n";
  }
  return witness ? 0 : 1;
}

// -------------------------------------------------------------------- ppdef

int cmd_ppdef(const Common& c, const std::string& file, const std::string& relation_file) {
  const auto l = load(file);
  const Relation r = parse_relation(read_text_file(relation_file));
  const auto cert = is_pp_definable(l.structure, r, c.limits);
  if (!validates(l.structure, r, cert, c.limits)) throw std::logic_error("certificate failed validation");
  if (c.machine()) {
    json j{{"definable", cert.definable}};
    if (cert.definition) {
      j["definition"] = cert.definition->to_string();
      j["variables"] = definition_variables(r.arity());
    } else {
      j["operation"] = operation_to_json(*cert.violating_operation);
      j["rows"] = cert.rows;
      j["image"] = cert.image;
    }
    print(j);
  } else if (cert.definable) {
    std::cout << "pp-definable\n  " << cert.definition->to_string() << "\n";
  } else {
    std::cout << "not pp-definable: a polymorphism of arity " << cert.violating_operation->arity()
              << " maps the relation's tuples outside it\n";
    for (std::size_t i = 0; i < cert.rows.size(); ++i) {
      std::cout << "  row " << i << ":";
      for (auto e : cert.rows[i]) std::cout << " " << e;
      std::cout << "\n";
    }
    std::cout << "  image:";
    for (auto e : cert.image) std::cout << " " << e;
    std::cout << "\n  operation values: " << json(cert.violating_operation->values()).dump() << "\n";
  }
  return cert.definable ? 0 : 1;
}

// -------------------------------------------------------------------- types

int cmd_types(const Common& c, const std::string& file, int n_max) {
  const auto l = load(file);
  json levels = json::array();
  std::ostringstream text;
  for (int n = 1; n <= n_max; ++n) {
    const auto rep = count_maximal_pp_types(l.structure, n, c.limits);
    json maximal = json::array();
    for (auto i : rep.maximal) maximal.push_back(rep.classes[i]);
    levels.push_back({{"n", n}, {"classes", rep.classes.size()}, {"maximal", rep.count()}, {"maximal_classes", maximal}});
    text << "n=" << n << ": " << rep.classes.size() << " type classes, " << rep.count() << " maximal";
    for (auto i : rep.maximal) text << " " << json(rep.classes[i]).dump();
    text << "\n";
  }
  const auto omega = omega_categoricity_report(l.structure, n_max, c.limits);
  if (c.machine())
    print({{"template", l.name}, {"levels", levels}, {"omega_categorical", omega.verdict}});
  else
    std::cout << text.str() << "omega-categorical: " << omega.verdict << "\n";
  return 0;
}

// ------------------------------------------------------------------ duality

int cmd_duality(const Common& c, const std::string& file, int n_max, ObstructionBounds bounds,
                const std::string& export_dir) {
  const auto l = load(file);
  const auto fo = fo_definability_report(l.structure, n_max, bounds, c.limits);
  std::vector<Obstruction> listed = fo.obstructions;
  if (!fo.fo_definable && !l.structure.signature().relations().empty())
    listed = critical_obstructions(l.structure, bounds, c.limits);

  if (!export_dir.empty()) {
    fs::create_directories(export_dir);
    json files = json::array();
    for (std::size_t i = 0; i < listed.size(); ++i) {
      const std::string name = "obstruction_" + std::to_string(i + 1) + ".json";
      std::ofstream(fs::path(export_dir) / name) << structure_to_json(listed[i].structure, "obstruction " + std::to_string(i + 1)).dump(2) << "\n";
      files.push_back({{"file", name},
                       {"vertices", listed[i].structure.size()},
                       {"hyperedges", listed[i].hyperedges},
                       {"critical", listed[i].critical}});
    }
    const json manifest{{"template", l.name},
                        {"hash", detail::hex64(fnv1a(l.text))},
                        {"fo_definable", fo.fo_definable},
                        {"verdict", fo.verdict},
                        {"complete", fo.fo_definable && fo.obstruction_set_complete},
                        {"bounds", {{"max_vertices", bounds.max_vertices}, {"max_tuples", bounds.max_tuples}}},
                        {"obstructions", files}};
    std::ofstream(fs::path(export_dir) / "manifest.json") << manifest.dump(2) << "\n";
  }

  if (c.machine()) {
    json j = fo_report_to_json(fo);
    j["fo_definable"] = fo.fo_definable;
    j["verdict"] = fo.verdict;
    print(j);
  } else {
    std::cout << fo.verdict << "\n";
    if (fo.fo_definable) std::cout << "sentence: " << fo.sentence << "\n";
    std::cout << listed.size() << " critical obstruction(s)" << (fo.fo_definable ? "" : " within bounds") << ":\n";
    for (const auto& o : listed)
      std::cout << "  " << o.structure.size() << " vertices, " << o.hyperedges << " tuples: "
                << canonical_query(o.structure).to_string() << "\n";
  }
  return fo.fo_definable ? 0 : 1;
}

// --------------------------------------------------------------------- horn

int cmd_horn_classify(const Common& c, const std::string& file, std::uint64_t budget) {
  const LinearCnf f = parse_cnf(read_text_file(file));
  const auto v = classify_horn(f, budget);
  if (c.machine()) {
    json j{{"horn", v.horn}, {"complexity", v.complexity()}, {"irreducible", clause_list(v.irreducible)}};
    if (!v.horn) {
      j["clause"] = to_text(v.irreducible.clauses()[*v.clause]);
      j["literals"] = {v.first, v.second};
      j["a"] = point_to_json(*v.a);
      j["a_prime"] = point_to_json(*v.a_prime);
      j["mix_preserves"] = check_mix_preservation(f, *v.a, *v.a_prime);
    }
    print(j);
  } else {
    std::cout << (v.horn ? "Horn" : "not Horn") << ": " << v.complexity() << "\nirreducible form:\n";
    const std::string body = to_text(v.irreducible);
    std::cout << (body.empty() ? "  (no clauses)\n" : body);
    if (!v.horn) {
      std::cout << "clause with two equations: " << to_text(v.irreducible.clauses()[*v.clause]) << "\n"
                << "  a  = " << to_text(*v.a) << "\n  a' = " << to_text(*v.a_prime) << "\n";
    }
  }
  return v.horn ? 0 : 1;
}

int cmd_horn_solve(const Common& c, const std::string& file, bool complete, std::uint64_t budget) {
  const LinearCnf f = parse_cnf(read_text_file(file));
  std::optional<RationalPoint> point;
  std::vector<LinearLiteral> derived;
  if (complete) {
    point = cnf_sat(f, budget);
  } else {
    if (!f.is_horn()) throw InvalidInput("the formula is not Horn; use --complete for the general solver");
    auto s = horn_solve(f);
    point = s.point;
    derived = s.derived;
  }
  if (c.machine()) {
    json d = json::array();
    for (const auto& l : derived) d.push_back(l.to_string());
    print({{"result", point ? "sat" : "unsat"}, {"point", point ? point_to_json(*point) : json(nullptr)}, {"derived", d}});
  } else {
    for (const auto& l : derived) std::cout << "derived " << l.to_string() << "\n";
    std::cout << (point ? "sat " + to_text(*point) : std::string("unsat")) << "\n";
  }
  return point ? 0 : 1;
}

// --------------------------------------------------------------- rewrite-ep

int cmd_rewrite(const Common& c, const std::string& file, const std::string& sentence_file, const std::string& p4) {
  const auto l = load(file);
  const Formula f = parse_formula(read_text_file(sentence_file), l.structure.signature());
  const Formula g = eliminate_disjunctions(f, p4, l.structure, c.limits);
  if (c.machine())
    print({{"input", f.to_string()}, {"output", g.to_string()}, {"pp", g.is_pp()}});
  else
    std::cout << g.to_string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polymorphisms, pp-definability and CSP dichotomy tools"};
  app.require_subcommand(1);
  int code = 0;

  Common analyze_c, solve_c, ppdef_c, types_c, duality_c, horn_c, rewrite_c;
  std::string structure_file, second_file, export_dir, p4 = "P";
  bool via_p4 = false, complete = false, relational_only = false;
  AnalysisOptions analysis;
  int types_n = 2, n_max = 3;
  ObstructionBounds bounds;
  std::uint64_t cnf_budget = 5'000'000;

  auto* analyze_cmd = app.add_subcommand("analyze", "Run every analysis on a template");
  analyze_cmd->add_option("structure", structure_file, "Structure file")->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--max-arity", analysis.max_arity, "Largest polymorphism arity")->capture_default_str()
      ->check(CLI::Range(1, 6));
  analyze_cmd->add_option("--types-n", analysis.types_n, "Largest pp-type tuple length")->capture_default_str()
      ->check(CLI::Range(1, 6));
  analyze_cmd->add_option("--duality-n", analysis.duality_n, "One-tolerant arities 3 .. N+1")->capture_default_str()
      ->check(CLI::Range(2, 6));
  analyze_cmd->add_option("--max-vertices", analysis.bounds.max_vertices, "Obstruction vertex bound")
      ->capture_default_str();
  analyze_cmd->add_option("--max-tuples", analysis.bounds.max_tuples, "Obstruction tuple bound")->capture_default_str();
  analyze_cmd->add_flag("--relational-only", relational_only,
                        "Local refutability without constants (default uses them)");
  add_common(analyze_cmd, analyze_c);
  analyze_cmd->callback([&] {
    if (relational_only) analysis.constants = ConstantHandling::relational_only;
    code = cmd_analyze(analyze_c, structure_file, analysis);
  });

  auto* solve_cmd = app.add_subcommand("solve", "Decide a pp or ep sentence on a template");
  solve_cmd->add_option("structure", structure_file, "Structure file")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("sentence", second_file, "Sentence file")->required()->check(CLI::ExistingFile);
  solve_cmd->add_flag("--via-p4", via_p4, "Eliminate disjunctions first using the P4 relation");
  solve_cmd->add_option("--p4-relation", p4, "Name of the relation interpreted as P4")->capture_default_str();
  add_common(solve_cmd, solve_c);
  solve_cmd->callback([&] { code = cmd_solve(solve_c, structure_file, second_file, via_p4, p4); });

  auto* ppdef_cmd = app.add_subcommand("ppdef", "Decide pp-definability of a relation with a certificate");
  ppdef_cmd->add_option("structure", structure_file, "Structure file")->required()->check(CLI::ExistingFile);
  ppdef_cmd->add_option("relation", second_file, "Relation file")->required()->check(CLI::ExistingFile);
  add_common(ppdef_cmd, ppdef_c);
  ppdef_cmd->callback([&] { code = cmd_ppdef(ppdef_c, structure_file, second_file); });

  auto* types_cmd = app.add_subcommand("types", "Count maximal pp-types");
  types_cmd->add_option("structure", structure_file, "Structure file")->required()->check(CLI::ExistingFile);
  types_cmd->add_option("-n,--n", types_n, "Largest tuple length")->capture_default_str()->check(CLI::Range(1, 6));
  add_common(types_cmd, types_c);
  types_cmd->callback([&] { code = cmd_types(types_c, structure_file, types_n); });

  auto* duality_cmd = app.add_subcommand("duality", "fo-definability via one-tolerant polymorphisms");
  duality_cmd->add_option("structure", structure_file, "Structure file")->required()->check(CLI::ExistingFile);
  duality_cmd->add_option("--n-max", n_max, "Try one-tolerant arities 3 .. N+1")->capture_default_str()
      ->check(CLI::Range(2, 6));
  duality_cmd->add_option("--max-vertices", bounds.max_vertices, "Obstruction vertex bound")->capture_default_str();
  duality_cmd->add_option("--max-tuples", bounds.max_tuples, "Obstruction tuple bound")->capture_default_str();
  duality_cmd->add_option("--export", export_dir, "Write obstructions and a manifest to this directory");
  add_common(duality_cmd, duality_c);
  duality_cmd->callback([&] { code = cmd_duality(duality_c, structure_file, n_max, bounds, export_dir); });

  auto* horn_cmd = app.add_subcommand("horn", "Linear CNF over the rationals");
  horn_cmd->require_subcommand(1);
  auto* classify_cmd = horn_cmd->add_subcommand("classify", "Horn or not, with P / NP-complete verdict");
  classify_cmd->add_option("cnf", second_file, "CNF file")->required()->check(CLI::ExistingFile);
  classify_cmd->callback([&] { code = cmd_horn_classify(horn_c, second_file, cnf_budget); });
  auto* hsolve_cmd = horn_cmd->add_subcommand("solve", "Solve a Horn CNF");
  hsolve_cmd->add_option("cnf", second_file, "CNF file")->required()->check(CLI::ExistingFile);
  hsolve_cmd->add_flag("--complete", complete, "Use the complete branching solver (any CNF)");
  for (auto* cmd : {classify_cmd, hsolve_cmd}) {
    add_common(cmd, horn_c);
    cmd->add_option("--budget", cnf_budget, "Branching budget of the complete solver")->capture_default_str();
  }
  hsolve_cmd->callback([&] { code = cmd_horn_solve(horn_c, second_file, complete, cnf_budget); });

  auto* rewrite_cmd = app.add_subcommand("rewrite-ep", "Rewrite an ep formula into an equivalent pp formula");
  rewrite_cmd->add_option("structure", structure_file, "Structure file")->required()->check(CLI::ExistingFile);
  rewrite_cmd->add_option("sentence", second_file, "Formula file")->required()->check(CLI::ExistingFile);
  rewrite_cmd->add_option("--p4-relation", p4, "Name of the relation interpreted as P4")->capture_default_str();
  add_common(rewrite_cmd, rewrite_c);
  rewrite_cmd->callback([&] { code = cmd_rewrite(rewrite_c, structure_file, second_file, p4); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return code;
}
