#include <gtest/gtest.h>

#include "polycsp/duality.hpp"
#include "polycsp/evaluation.hpp"
#include "polycsp/formula_parser.hpp"
#include "sentence_eval.hpp"
#include "test_support.hpp"

using namespace polycsp;
using namespace testing_support;

namespace {

Structure u_and_v() { return make(2, {{"U", 1, {{1}}}, {"V", 1, {{0}}}}); }
Structure loop() { return make(1, {{"E", 2, {{0, 0}}}}); }

// All structures over a unary signature {U, V} with n elements.
std::vector<Structure> unary_instances(int n) {
  std::vector<Structure> out;
  const int cells = 2 * n;
  for (int mask = 0; mask < (1 << cells); ++mask) {
    std::vector<Tuple> u, v;
    for (int e = 0; e < n; ++e) {
      if (mask >> e & 1) u.push_back({e});
      if (mask >> (n + e) & 1) v.push_back({e});
    }
    out.push_back(make(n, {{"U", 1, u}, {"V", 1, v}}));
  }
  return out;
}

bool contains_isomorphic(const std::vector<Obstruction>& obs, const Structure& s) {
  return std::any_of(obs.begin(), obs.end(), [&](const Obstruction& o) { return are_isomorphic(o.structure, s); });
}

}  // namespace

TEST(OneTolerant, UnaryTemplateHasMajority) {
  const Structure a = make(2, {{"U", 1, {{1}}}});
  const auto f = has_one_tolerant_polymorphism(a, 3);
  ASSERT_TRUE(f);
  EXPECT_TRUE(f->preserves(a));
  EXPECT_TRUE(is_homomorphism(one_tolerant_power(a, 3), a, f->values()));
  for (int x = 0; x < 2; ++x) EXPECT_EQ((*f)(Tuple{x, x, x}), x);
  EXPECT_EQ((*f)(Tuple{1, 1, 0}), 1);
  EXPECT_EQ((*f)(Tuple{0, 1, 1}), 1);
}

TEST(OneTolerant, AbsentForK2) {
  EXPECT_FALSE(has_one_tolerant_polymorphism(k2(), 3));
  EXPECT_FALSE(has_one_tolerant_polymorphism(k2(), 4));
  EXPECT_THROW(has_one_tolerant_polymorphism(k2(), 2), InvalidInput);
}

TEST(OneTolerant, DiagonalIsEndomorphism) {
  std::mt19937 rng(401);
  int found = 0;
  for (int it = 0; it < 40; ++it) {
    const Structure a = random_structure(rng, 2, 2, 2, 0.5);
    const auto f = has_one_tolerant_polymorphism(a, 3);
    if (!f) continue;
    ++found;
    std::vector<Element> diag;
    for (int x = 0; x < a.size(); ++x) diag.push_back((*f)(Tuple{x, x, x}));
    EXPECT_TRUE(is_homomorphism(a, a, diag));
  }
  EXPECT_GT(found, 0);
}

TEST(Obstructions, UnaryTemplate) {
  const auto obs = critical_obstructions(u_and_v(), {5, 10});
  ASSERT_EQ(obs.size(), 1u);
  EXPECT_EQ(obs[0].structure.size(), 1);
  EXPECT_EQ(obs[0].hyperedges, 2u);
  EXPECT_TRUE(obs[0].structure.relation("U").contains(Tuple{0}));
  EXPECT_TRUE(obs[0].structure.relation("V").contains(Tuple{0}));
}

TEST(Obstructions, K2GivesLoopAndOddCycles) {
  const auto obs = critical_obstructions(k2(), {5, 10});
  const Structure looped = make(1, {{"E", 2, {{0, 0}}}});
  EXPECT_TRUE(contains_isomorphic(obs, looped));
  EXPECT_TRUE(contains_isomorphic(obs, directed_cycle(3)));
  EXPECT_TRUE(contains_isomorphic(obs, directed_cycle(5)));
  // Deleting one arc of the symmetric triangle still leaves an odd cycle.
  EXPECT_FALSE(contains_isomorphic(obs, symmetric_cycle(3)));
  EXPECT_FALSE(is_critical_obstruction(symmetric_cycle(3), k2()));
  for (const auto& o : obs) {
    EXPECT_TRUE(o.critical);
    EXPECT_FALSE(has_homomorphism(o.structure, k2()));
    EXPECT_TRUE(is_critical_obstruction(o.structure, k2()));
    for (const auto& p : obs)
      if (&o != &p) {
        EXPECT_FALSE(are_isomorphic(o.structure, p.structure));
      }
  }
}

TEST(Obstructions, CriticalityMatchesDeletionOracle) {
  std::mt19937 rng(409);
  for (int it = 0; it < 10; ++it) {
    const Structure a = random_structure(rng, 2, 2, 2, 0.5);
    for (const auto& o : critical_obstructions(a, {3, 4})) {
      EXPECT_TRUE(oracle_homs(relational_reduct(o.structure), relational_reduct(a)).empty());
      for (std::size_t r = 0; r < o.structure.relations().size(); ++r)
        for (const auto& t : o.structure.relation(r)) {
          Structure smaller = o.structure;
          smaller.remove_tuple(r, t);
          EXPECT_FALSE(oracle_homs(smaller, relational_reduct(a)).empty());
        }
    }
  }
}

TEST(Obstructions, LoopedElementHasNone) {
  EXPECT_TRUE(critical_obstructions(loop(), {5, 10}).empty());
  const Structure all = make(1, {{"U", 1, {{0}}}, {"E", 2, {{0, 0}}}});
  EXPECT_TRUE(critical_obstructions(all, {4, 5}).empty());
}

TEST(Obstructions, BoundsAreValidated) {
  EXPECT_THROW(critical_obstructions(k2(), {0, 3}), InvalidInput);
  EXPECT_THROW(critical_obstructions(k2(), {9, 3}), BudgetExceeded);
}

TEST(UniversalSentence, TextAndEmptySet) {
  const auto obs = critical_obstructions(u_and_v(), {5, 10});
  EXPECT_EQ(universal_sentence(obs), "(forall x0 . ~(U(x0) & V(x0)))");
  EXPECT_EQ(universal_sentence({}), "true");
}

TEST(FoReport, UnaryTemplateAgreesWithCspOnSmallInstances) {
  const Structure a = u_and_v();
  const auto report = fo_definability_report(a, 3);
  ASSERT_TRUE(report.fo_definable);
  EXPECT_TRUE(report.obstruction_set_complete);
  ASSERT_EQ(report.obstructions.size(), 1u);
  EXPECT_NE(report.verdict.find("fo-definable"), std::string::npos);
  for (int n = 1; n <= 4; ++n)
    for (const auto& inst : unary_instances(n)) {
      const bool csp = has_homomorphism(inst, a);
      EXPECT_EQ(universal_sentence_holds(report.sentence, inst), csp);
      EXPECT_EQ(excludes_all(inst, report.obstructions), csp);
    }
}

TEST(FoReport, K2IsBoundedNegative) {
  const auto report = fo_definability_report(k2(), 3);
  EXPECT_FALSE(report.fo_definable);
  EXPECT_FALSE(report.tolerant_polymorphism);
  ASSERT_TRUE(report.evidence);
  // Some orientation of the 5-cycle: five arcs whose symmetric closure is C5.
  const Structure& c = report.evidence->structure;
  EXPECT_EQ(c.size(), 5);
  EXPECT_EQ(report.evidence->hyperedges, 5u);
  std::vector<std::pair<int, int>> edges;
  for (const auto& t : c.relation("E")) edges.emplace_back(t[0], t[1]);
  EXPECT_TRUE(are_isomorphic(make(5, {{"E", 2, symmetric(edges)}}), symmetric_cycle(5)));
  EXPECT_NE(report.verdict.find("not a proof"), std::string::npos);
}

TEST(FoReport, LoopedElementGivesTrueSentence) {
  const auto report = fo_definability_report(loop(), 2);
  EXPECT_TRUE(report.fo_definable);
  EXPECT_TRUE(report.obstructions.empty());
  EXPECT_EQ(report.sentence, "true");
}

TEST(FoReport, SentenceAgreesWithCspOnRandomBinaryTemplates) {
  std::mt19937 rng(419);
  int certified = 0;
  for (int it = 0; it < 30 && certified < 5; ++it) {
    const Structure a = make(2, {{"E", 2, [&] {
                                    std::vector<Tuple> ts;
                                    for_each_tuple(2, 2, [&](const Tuple& t) {
                                      if (rng() % 2) ts.push_back(t);
                                    });
                                    return ts;
                                  }()}});
    const auto report = fo_definability_report(a, 2);
    if (!report.fo_definable || !report.obstruction_set_complete) continue;
    ++certified;
    for (int n = 1; n <= 3; ++n)
      for (int mask = 0; mask < (1 << (n * n)); ++mask) {
        std::vector<Tuple> e;
        for (int c = 0; c < n * n; ++c)
          if (mask >> c & 1) e.push_back({c / n, c % n});
        const Structure inst = make(n, {{"E", 2, e}});
        const bool csp = has_homomorphism(inst, a);
        EXPECT_EQ(universal_sentence_holds(report.sentence, inst), csp) << report.sentence;
      }
  }
  EXPECT_GT(certified, 0);
}

TEST(ObstructionSize, TolerantPolymorphismBoundsObstructionSize) {
  std::mt19937 rng(421);
  for (int it = 0; it < 12; ++it) {
    const Structure a = random_structure(rng, 2, 2, 2, 0.5);
    if (a.signature().relations().empty()) continue;
    for (int arity = 3; arity <= 4; ++arity) {
      if (!has_one_tolerant_polymorphism(a, arity)) continue;
      for (const auto& o : critical_obstructions(a, {4, 5})) EXPECT_LE(o.hyperedges, static_cast<std::size_t>(arity - 1));
      break;
    }
  }
}
