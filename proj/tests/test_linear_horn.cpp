#include <gtest/gtest.h>

#include "cnf_support.hpp"
#include "polycsp/cnf_io.hpp"
#include "polycsp/linear_horn.hpp"

using namespace polycsp;
using namespace testing_support;

namespace {

LinearCnf cnf(const std::string& text) { return parse_cnf(text); }
Rational r(long n, long d = 1) { return Rational(n) / d; }

QuadExtNumber random_quad(std::mt19937& rng) {
  auto small = [&] { return Rational(static_cast<long>(rng() % 21) - 10) / (1 + static_cast<long>(rng() % 6)); };
  return {small(), small()};
}

// A point satisfying the equation l, chosen by drawing all variables but the
// lead one and solving for it.
RationalPoint random_solution(std::mt19937& rng, const LinearLiteral& l, const std::vector<std::string>& vars) {
  RationalPoint p;
  for (const auto& v : vars) p[v] = static_cast<long>(rng() % 7) - 3;
  const std::string& lead = l.coefficients().begin()->first;
  Rational rest = 0;
  for (const auto& [x, c] : l.coefficients())
    if (x != lead) rest += c * p[x];
  p[lead] = l.constant() - rest;
  return p;
}

}  // namespace

TEST(Rational, ParseAndPrint) {
  EXPECT_EQ(parse_rational("-6/4"), r(-3, 2));
  EXPECT_EQ(to_string(parse_rational("10/5")), "2");
  EXPECT_THROW(parse_rational("1/0"), InvalidInput);
  EXPECT_THROW(parse_rational("a"), InvalidInput);
  const Rational x = r(6, -4);
  EXPECT_EQ(numerator(x), -3);
  EXPECT_EQ(denominator(x), 2);
}

TEST(QuadExt, FieldIdentities) {
  std::mt19937 rng(501);
  for (int it = 0; it < 1000; ++it) {
    const auto a = random_quad(rng), b = random_quad(rng), c = random_quad(rng);
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ(a - a, QuadExtNumber(0));
    EXPECT_EQ(a * QuadExtNumber(1), a);
    if (!a.is_zero()) {
      EXPECT_EQ(a * a.inverse(), QuadExtNumber(1));
      EXPECT_EQ((b / a) * a, b);
    }
  }
  EXPECT_EQ(QuadExtNumber::sqrt2() * QuadExtNumber::sqrt2(), QuadExtNumber(2));
  EXPECT_THROW(QuadExtNumber(0).inverse(), InvalidInput);
  EXPECT_EQ(QuadExtNumber(r(1, 2), -3).to_string(), "1/2 + -3*sqrt2");
}

TEST(Literal, Normalization) {
  const auto l = LinearLiteral::equation({{"x", 2}, {"y", -2}}, 4);
  EXPECT_EQ(l.coefficients().at("x"), 1);
  EXPECT_EQ(l.coefficients().at("y"), -1);
  EXPECT_EQ(l.constant(), 2);
  EXPECT_EQ(l, LinearLiteral::equation({{"x", -1}, {"y", 1}}, -2));
  const auto trivial = LinearLiteral::equation({{"x", 1}, {"y", 0}}, 0);
  EXPECT_EQ(trivial.coefficients().size(), 1u);
  const auto valid = LinearLiteral::equation({{"x", 0}}, 0);
  EXPECT_TRUE(valid.is_constant());
  EXPECT_TRUE(valid.holds(RationalPoint{}));
  EXPECT_FALSE(LinearLiteral::equation({}, 5).holds(RationalPoint{}));
  EXPECT_EQ(l.negated().to_string(), "~1*x + -1*y = 2");
}

TEST(ConjSat, Examples) {
  const auto p = conj_sat({LinearLiteral::equation({{"x", 1}, {"y", 1}}, 1), LinearLiteral::equation({{"x", 1}, {"y", -1}}, 0)}, {});
  ASSERT_TRUE(p);
  EXPECT_EQ(p->at("x"), r(1, 2));
  EXPECT_EQ(p->at("y"), r(1, 2));
  EXPECT_FALSE(conj_sat({LinearLiteral::equation({{"x", 1}}, 1), LinearLiteral::equation({{"x", 1}}, 0)}, {}));
  const auto eq = LinearLiteral::equation({{"x", 1}, {"y", 1}}, 1);
  const auto neq = LinearLiteral::disequation({{"x", 1}, {"y", -1}}, 0);
  const auto q = conj_sat({eq}, {neq});
  ASSERT_TRUE(q);
  EXPECT_TRUE(eq.holds(*q));
  EXPECT_TRUE(neq.holds(*q));
  EXPECT_FALSE(conj_sat({eq}, {LinearLiteral::disequation({{"x", 2}, {"y", 2}}, 2)}));
}

TEST(ConjSat, AvoidsManyHyperplanes) {
  std::vector<LinearLiteral> neqs;
  for (int k = -5; k <= 5; ++k) {
    neqs.push_back(LinearLiteral::disequation({{"x", 1}}, k));
    neqs.push_back(LinearLiteral::disequation({{"x", 1}, {"y", -k}}, 0));
  }
  const auto p = conj_sat({}, neqs);
  ASSERT_TRUE(p);
  for (const auto& l : neqs) EXPECT_TRUE(l.holds(*p));
}

TEST(CnfSat, Examples) {
  const auto p = cnf_sat(cnf("x = y | u = v"));
  ASSERT_TRUE(p);
  EXPECT_TRUE(cnf("x = y | u = v").holds(*p));
  EXPECT_FALSE(cnf_sat(cnf("x = 0\n~x = 0")));
  EXPECT_FALSE(cnf_sat(cnf("x = 1 | y = 1\nx != 1\ny != 1")));
  EXPECT_FALSE(cnf_sat(cnf("false")));
  EXPECT_TRUE(cnf_sat(LinearCnf{}));
}

TEST(CnfSat, SoundAndAgreesWithGridSearch) {
  std::mt19937 rng(503);
  for (int it = 0; it < 300; ++it) {
    const auto f = random_cnf(rng, 3, 4, 3, false);
    const auto p = cnf_sat(f);
    if (p) {
      EXPECT_TRUE(f.holds(*p)) << to_text(f);
    }
    if (!grid_models(f, -2, 2).empty()) {
      EXPECT_TRUE(p) << to_text(f);
    }
  }
}

TEST(CnfSat, BudgetIsEnforced) {
  std::mt19937 rng(509);
  const auto f = random_cnf(rng, 6, 8, 3, false);
  EXPECT_THROW(cnf_sat(cnf("x = 1 | x = 2 | x = 3\ny = 1 | y = 2 | y = 3\nx != y\nx != 1"), 2), BudgetExceeded);
  EXPECT_NO_THROW(cnf_sat(f));
}

TEST(Irreducible, Examples) {
  EXPECT_TRUE(make_irreducible(cnf("x = x | y = z")).clauses().empty());
  const auto f = cnf("x = y | u = v");
  EXPECT_EQ(make_irreducible(f), f);
  const auto g = make_irreducible(cnf("x = 0\nx = 0 | y = 0"));
  ASSERT_EQ(g.clauses().size(), 1u);
  EXPECT_EQ(to_text(g), "1*x = 0\n");
}

TEST(Irreducible, EquivalentAndMinimal) {
  std::mt19937 rng(521);
  for (int it = 0; it < 150; ++it) {
    const auto f = random_cnf(rng, 4, 4, 3, false);
    const auto g = make_irreducible(f);
    EXPECT_TRUE(equivalent(f, g)) << to_text(f);
    EXPECT_EQ(f.variables(), g.variables());
    // No literal of the result can be dropped and no clause is redundant.
    for (std::size_t i = 0; i < g.clauses().size(); ++i) {
      auto without_clause = g.clauses();
      without_clause.erase(without_clause.begin() + static_cast<std::ptrdiff_t>(i));
      EXPECT_FALSE(equivalent(g, g.with_clauses(without_clause))) << to_text(g);
      for (std::size_t j = 0; j < g.clauses()[i].size() && g.clauses()[i].size() > 1; ++j) {
        auto clauses = g.clauses();
        clauses[i].erase(clauses[i].begin() + static_cast<std::ptrdiff_t>(j));
        EXPECT_FALSE(equivalent(g, g.with_clauses(clauses))) << to_text(g);
      }
    }
  }
}

TEST(Classify, Examples) {
  const auto f = cnf("x = y | u = v");
  const auto v = classify_horn(f);
  EXPECT_FALSE(v.horn);
  EXPECT_EQ(v.complexity(), "CSP NP-complete");
  ASSERT_TRUE(v.a && v.a_prime);
  EXPECT_TRUE(f.holds(*v.a));
  EXPECT_TRUE(f.holds(*v.a_prime));
  const auto& c = v.irreducible.clauses()[*v.clause];
  EXPECT_TRUE(c[v.first].holds(*v.a));
  EXPECT_FALSE(c[v.second].holds(*v.a));
  EXPECT_TRUE(c[v.second].holds(*v.a_prime));
  EXPECT_FALSE(c[v.first].holds(*v.a_prime));
  EXPECT_FALSE(check_mix_preservation(f, *v.a, *v.a_prime));

  const auto h = classify_horn(cnf("~(x = 1) | y = 0"));
  EXPECT_TRUE(h.horn);
  EXPECT_EQ(h.complexity(), "CSP in P");
  EXPECT_TRUE(classify_horn(cnf("x = x | y = z")).horn);
}

TEST(Classify, HiddenHornAfterReduction) {
  // The second equation is implied by the unit clause, so the clause collapses.
  const auto v = classify_horn(cnf("x = 0\nx = 0 | y = 1"));
  EXPECT_TRUE(v.horn);
}

TEST(HornSolve, Examples) {
  const auto s = horn_solve(cnf("x = 1\n~(x = 1) | y = 2"));
  ASSERT_TRUE(s.sat);
  EXPECT_EQ(s.point->at("y"), 2);
  ASSERT_EQ(s.derived.size(), 2u);
  EXPECT_EQ(s.derived[1].to_string(), "1*y = 2");
  EXPECT_FALSE(horn_solve(cnf("x = 1\n~(x = 1)")).sat);
  EXPECT_FALSE(horn_solve(cnf("x + y = 2\nx - y = 0\n~(x = 1)")).sat);
  EXPECT_THROW(horn_solve(cnf("x = y | u = v")), InvalidInput);
}

TEST(HornSolve, AgreesWithCompleteSolver) {
  std::mt19937 rng(523);
  int sat = 0, unsat = 0;
  for (int it = 0; it < 500; ++it) {
    const auto f = random_cnf(rng, 6, 8, 3, true);
    ASSERT_TRUE(f.is_horn());
    const auto h = horn_solve(f);
    const auto c = cnf_sat(f);
    EXPECT_EQ(h.sat, c.has_value()) << to_text(f);
    if (h.sat) {
      EXPECT_TRUE(f.holds(*h.point)) << to_text(f);
    }
    (h.sat ? sat : unsat)++;
  }
  EXPECT_GT(sat, 25);
  EXPECT_GT(unsat, 25);
}

TEST(Mix, Examples) {
  const auto m = mix({{"x", 0}, {"y", 0}}, {{"x", 1}, {"y", 1}});
  EXPECT_EQ(m.at("x"), QuadExtNumber::sqrt2());
  EXPECT_EQ(m.at("y"), QuadExtNumber::sqrt2());
  const RationalPoint p{{"x", r(3, 7)}, {"y", -2}};
  const auto same = mix(p, p);
  for (const auto& [x, v] : p) EXPECT_EQ(same.at(x), QuadExtNumber(v));
  const auto n = mix({{"x", 0}, {"y", 1}}, {{"x", 2}, {"y", 0}});
  EXPECT_EQ(n.at("x"), QuadExtNumber(0, 2));
  EXPECT_EQ(n.at("y"), QuadExtNumber(1, -1));
  EXPECT_FALSE(cnf("x = 0 | y = 0").holds(n));
  EXPECT_THROW(mix({{"x", 0}}, {{"x", 0}, {"y", 0}}), InvalidInput);
}

TEST(Mix, PreservationExamples) {
  EXPECT_TRUE(check_mix_preservation(cnf("~(x = 1) | y = 0"), {{"x", 1}, {"y", 0}}, {{"x", 5}, {"y", 3}}));
  EXPECT_TRUE(check_mix_preservation(cnf("x = y"), {{"x", 3}, {"y", 3}}, {{"x", 3}, {"y", 3}}));
  EXPECT_FALSE(check_mix_preservation(cnf("x = 0 | y = 0"), {{"x", 0}, {"y", 1}}, {{"x", 2}, {"y", 0}}));
  EXPECT_THROW(check_mix_preservation(cnf("x = 0"), {{"x", 1}}, {{"x", 0}}), InvalidInput);
}

TEST(Mix, PreservesAndReflectsEquations) {
  std::mt19937 rng(541);
  const std::vector<std::string> vars{"x0", "x1", "x2"};
  int both = 0, one = 0;
  for (int it = 0; it < 2000; ++it) {
    const auto l = random_literal(rng, 3, 1);
    if (l.is_constant()) continue;
    const RationalPoint p = random_solution(rng, l, vars);
    RationalPoint q = rng() % 2 ? random_solution(rng, l, vars) : p;
    if (rng() % 2) q[l.coefficients().begin()->first] += 1 + static_cast<long>(rng() % 3);
    const bool sp = l.holds(p), sq = l.holds(q);
    ASSERT_TRUE(sp);
    const bool sm = l.holds(mix(p, q));
    const bool sm_rev = l.holds(mix(q, p));
    if (sq) {
      EXPECT_TRUE(sm);
      EXPECT_TRUE(sm_rev);
      ++both;
    } else {
      EXPECT_FALSE(sm);
      EXPECT_FALSE(sm_rev);
      ++one;
    }
  }
  EXPECT_GT(both, 200);
  EXPECT_GT(one, 200);
}

TEST(Mix, InjectiveOnRationalPairs) {
  std::mt19937 rng(547);
  for (int it = 0; it < 500; ++it) {
    const Rational a = static_cast<long>(rng() % 9) - 4, b = static_cast<long>(rng() % 9) - 4;
    const Rational c = static_cast<long>(rng() % 9) - 4, d = static_cast<long>(rng() % 9) - 4;
    const auto m1 = mix({{"x", a}}, {{"x", b}}).at("x");
    const auto m2 = mix({{"x", c}}, {{"x", d}}).at("x");
    EXPECT_EQ(m1 == m2, a == c && b == d);
  }
}

TEST(Dichotomy, Coherence) {
  std::mt19937 rng(557);
  int horn = 0, non_horn = 0;
  for (int it = 0; it < 60; ++it) {
    const auto f = random_cnf(rng, 4, 4, 3, false);
    const auto v = classify_horn(f);
    if (v.horn) {
      ++horn;
      const auto models = grid_models(f, -1, 2);
      for (int k = 0; k < 50 && !models.empty(); ++k) {
        const auto& p = models[rng() % models.size()];
        const auto& q = models[rng() % models.size()];
        EXPECT_TRUE(check_mix_preservation(f, p, q)) << to_text(f);
      }
    } else {
      ++non_horn;
      EXPECT_FALSE(check_mix_preservation(f, *v.a, *v.a_prime)) << to_text(f);
    }
  }
  EXPECT_GT(horn, 0);
  EXPECT_GT(non_horn, 0);
}

TEST(CnfText, ParsesGrammar) {
  const auto f = cnf("# comment\n2x + 3*y = 1 | ~(x = y)  # tail\n\nx != -1/2\n-x + 2 = y - 3");
  ASSERT_EQ(f.clauses().size(), 3u);
  EXPECT_EQ(f.clauses()[0].size(), 2u);
  EXPECT_EQ(to_text(f.clauses()[1]), "~1*x = -1/2");
  EXPECT_EQ(to_text(f.clauses()[2]), "1*x + 1*y = 5");
  EXPECT_EQ(f.variables(), (std::set<std::string>{"x", "y"}));
}

TEST(CnfText, RoundTrip) {
  std::mt19937 rng(563);
  for (int it = 0; it < 200; ++it) {
    const auto f = random_cnf(rng, 5, 4, 3, false);
    const auto g = parse_cnf(to_text(f));
    EXPECT_EQ(g.clauses(), f.clauses()) << to_text(f);
  }
}

TEST(CnfText, ReportsPositions) {
  try {
    parse_cnf("x = 1\ny = = 2");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_GT(e.column(), 0);
  }
  EXPECT_THROW(parse_cnf("x + 1"), ParseError);
  EXPECT_THROW(parse_cnf("x = 1 |"), ParseError);
  EXPECT_THROW(parse_cnf("x = 1/0"), ParseError);
}
