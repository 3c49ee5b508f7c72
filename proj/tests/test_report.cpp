#include <gtest/gtest.h>

#include "polycsp/report.hpp"
#include "polycsp/structure_io.hpp"
#include "test_support.hpp"

using namespace polycsp;
using namespace testing_support;

namespace {

AnalysisReport run(const Structure& a, const std::string& name) {
  return analyze(a, name, structure_to_json(a, name).dump());
}

}  // namespace

TEST(Analyze, K2) {
  const auto r = run(k2(), "K2");
  EXPECT_TRUE(r.errors.empty());
  EXPECT_EQ(r.core, true);
  EXPECT_EQ(r.epc, true);
  EXPECT_EQ(r.locally_refutable, false);
  // The ternary minority operation x - y + z is a polymorphism of K2.
  EXPECT_EQ(r.essentially_unary, false);
  ASSERT_TRUE(r.unarity_certificate.is_object());
  const auto op = operation_from_json(r.unarity_certificate["operation"]);
  EXPECT_TRUE(op.preserves(k2()));
  EXPECT_FALSE(is_essentially_unary(op).essentially_unary);
  EXPECT_FALSE(r.np_hardness_flag);
  EXPECT_EQ(r.polymorphism_counts.at(1), 2u);
  EXPECT_EQ(r.polymorphism_counts.at(2), oracle_polymorphisms(k2(), 2).size());
  EXPECT_EQ(r.polymorphism_counts.at(3), oracle_polymorphisms(k2(), 3).size());
  EXPECT_EQ(r.maximal_pp_types.at(1), 1u);
  EXPECT_EQ(r.fo_definable, false);
  EXPECT_NE(r.fo_verdict.find("not a proof"), std::string::npos);
  EXPECT_EQ(r.domain_size, 2);
  EXPECT_EQ(r.file_hash.size(), 16u);
}

TEST(Analyze, UnaryTemplate) {
  const auto r = run(make(2, {{"U", 1, {{1}}}}), "U");
  EXPECT_TRUE(r.errors.empty());
  EXPECT_EQ(r.fo_definable, true);
  EXPECT_EQ(r.maximal_pp_types.at(1), 1u);
  EXPECT_FALSE(r.fo_certificate["sentence"].get<std::string>().empty());
  EXPECT_EQ(r.core, false);
  ASSERT_TRUE(r.core_certificate.is_object());
}

TEST(Analyze, EmptyRelationIsLocallyRefutable) {
  const auto r = run(make(2, {{"E", 2, {}}}), "empty");
  EXPECT_EQ(r.locally_refutable, true);
  EXPECT_FALSE(r.np_hardness_flag);
  EXPECT_EQ(r.np_hardness_note, "not raised: locally refutable");
}

TEST(Analyze, K3RaisesBoundedFlag) {
  const auto r = run(k3(), "K3");
  EXPECT_EQ(r.locally_refutable, false);
  EXPECT_EQ(r.essentially_unary, true);
  EXPECT_TRUE(r.np_hardness_flag);
  EXPECT_NE(r.np_hardness_note.find("(bounded evidence, not a proof)"), std::string::npos);
}

TEST(Analyze, FlagConsistentWithSubVerdicts) {
  std::mt19937 rng(601);
  for (int it = 0; it < 25; ++it) {
    const Structure a = random_structure(rng, 3, 2, 2, 0.5);
    AnalysisOptions opt;
    opt.max_arity = 2;
    opt.types_n = 1;
    opt.duality_n = 2;
    opt.bounds = {3, 4};
    const auto r = analyze(a, "random", "", opt);
    EXPECT_EQ(r.np_hardness_flag, r.locally_refutable == false && r.essentially_unary == true);
    EXPECT_EQ(r.core, r.epc);
  }
}

TEST(Analyze, BudgetFailuresStayInTheirSection) {
  AnalysisOptions opt;
  opt.limits.search_nodes = 3;
  const auto r = analyze(k3(), "K3", "", opt);
  EXPECT_FALSE(r.errors.empty());
  for (const auto& [section, message] : r.errors) EXPECT_FALSE(message.empty()) << section;
  EXPECT_TRUE(r.errors.count("polymorphism_counts.3") || r.errors.count("essentially_unary"));
  EXPECT_FALSE(r.np_hardness_flag);
  // Sections that never search still report.
  EXPECT_TRUE(r.locally_refutable.has_value());
}

TEST(Report, JsonRoundTrip) {
  for (const auto& [a, name] : std::vector<std::pair<Structure, std::string>>{
           {k2(), "K2"}, {make(2, {{"U", 1, {{1}}}}), "U"}, {make(2, {{"E", 2, {}}}), "empty"}}) {
    const auto r = run(a, name);
    const auto j = report_to_json(r);
    EXPECT_EQ(report_from_json(nlohmann::json::parse(j.dump())), r) << name;
    EXPECT_EQ(report_to_json(report_from_json(j)).dump(), j.dump());
  }
  AnalysisOptions opt;
  opt.limits.search_nodes = 3;
  const auto failing = analyze(k3(), "K3", "", opt);
  EXPECT_EQ(report_from_json(report_to_json(failing)), failing);
}

TEST(Report, Deterministic) {
  EXPECT_EQ(report_to_json(run(k2(), "K2")).dump(), report_to_json(run(k2(), "K2")).dump());
}

TEST(Report, RejectsMalformedDocuments) {
  EXPECT_THROW(report_from_json(nlohmann::json::object()), ParseError);
  auto j = report_to_json(run(k2(), "K2"));
  j["core"]["value"] = "maybe";
  EXPECT_THROW(report_from_json(j), ParseError);
}

TEST(Report, TextMentionsEverySection) {
  const std::string text = report_to_text(run(k2(), "K2"));
  for (const char* needle : {"core:", "polymorphism counts:", "essentially unary", "locally refutable:",
                             "maximal pp-types:", "fo-definable:", "not raised"})
    EXPECT_NE(text.find(needle), std::string::npos) << needle;
}
