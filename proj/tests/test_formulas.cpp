#include <gtest/gtest.h>

#include "polycsp/disjunction_elimination.hpp"
#include "polycsp/formula_parser.hpp"
#include "test_support.hpp"

using namespace polycsp;
using namespace testing_support;

namespace {

bool contains_disjunction(const Formula& f) {
  if (f.kind() == Formula::Kind::disjunction) return true;
  for (const auto& c : f.children())
    if (contains_disjunction(c)) return true;
  return false;
}

Structure unary_one() { return make(2, {{"U", 1, {{1}}}}); }

/// Signature {E/2, P/4} with P interpreted as (u=v | x=y) and E as given.
Structure with_p4(int n, std::vector<Tuple> e) { return make(n, {{"E", 2, std::move(e)}, {"P", 4, p4_tuples(n)}}); }

}  // namespace

TEST(Parser, ParsesDocumentedSyntax) {
  const Formula f = parse_formula("exists x y . E(x,y) & (x=y | u=v)");
  EXPECT_EQ(f.kind(), Formula::Kind::exists);
  EXPECT_EQ(f.bound(), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(f.fragment(), Fragment::ep);
  EXPECT_EQ(f.free_variables(), (std::set<std::string>{"u", "v"}));
  EXPECT_EQ(parse_formula(f.to_string()), f);
  EXPECT_EQ(parse_formula("false").kind(), Formula::Kind::falsum);
  EXPECT_TRUE(parse_formula("exists x . E(x,x)").is_pp());
}

TEST(Parser, ConstantsAreRecognized) {
  const Formula f = parse_formula("exists x . E(x,c)", std::set<std::string>{"c"});
  EXPECT_EQ(f.body().terms()[1].kind, Term::Kind::constant);
  const Formula g = parse_formula("exists c . E(c,c)", std::set<std::string>{"c"});
  EXPECT_EQ(g.body().terms()[0].kind, Term::Kind::variable);
}

TEST(Parser, RejectsUniversalAndNegation) {
  EXPECT_THROW(parse_formula("forall x . E(x,x)"), ParseError);
  EXPECT_THROW(parse_formula("exists x . ~E(x,x)"), ParseError);
  EXPECT_THROW(parse_formula("exists x . not E(x,x)"), ParseError);
  EXPECT_THROW(parse_formula("exists x . !E(x,x)"), ParseError);
  EXPECT_THROW(parse_formula("E(x,y) -> E(y,x)"), ParseError);
}

TEST(Parser, ReportsLineAndColumn) {
  try {
    parse_formula("exists x .\n  E(x,,x)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 7);
  }
}

TEST(Parser, SignatureChecks) {
  EXPECT_THROW(parse_formula("exists x . F(x,x)", k2().signature()), InvalidInput);
  EXPECT_THROW(parse_formula("exists x . E(x)", k2().signature()), InvalidInput);
}

TEST(Evaluate, SpecExamples) {
  EXPECT_TRUE(evaluate(k2(), parse_formula("exists x y . E(x,y)")));
  EXPECT_FALSE(evaluate(k2(), parse_formula("exists x . E(x,x)")));
  const Formula f = parse_formula("exists x y . U(x) & x=y");
  EXPECT_TRUE(evaluate(unary_one(), f));
  EXPECT_EQ(evaluate(unary_one(), f), oracle_eval(unary_one(), f));
}

TEST(Evaluate, Errors) {
  EXPECT_THROW(evaluate(k2(), parse_formula("E(x,y)")), InvalidInput);
  EXPECT_THROW(evaluate(k2(), parse_formula("exists x . F(x)")), InvalidInput);
  EXPECT_THROW(evaluate(k2(), parse_formula("exists x . E(x,x,x)")), InvalidInput);
  EXPECT_TRUE(evaluate(k2(), parse_formula("E(x,y)"), {{"x", 0}, {"y", 1}}));
}

TEST(Evaluate, AgreesWithTarskiOracle) {
  std::mt19937 rng(101);
  int compared = 0;
  for (int it = 0; it < 60; ++it) {
    const Structure a = random_structure(rng, 3, 2, 3, 0.4, true);
    FormulaGenerator gen(a.signature(), rng, 4, 3);
    for (int j = 0; j < 10; ++j) {
      const Formula phi = gen.sentence();
      ASSERT_EQ(evaluate(a, phi), oracle_eval(a, phi)) << phi.to_string();
      ++compared;
    }
  }
  EXPECT_EQ(compared, 600);
}

TEST(Evaluate, FreeVariablesMatchOracle) {
  std::mt19937 rng(103);
  for (int it = 0; it < 30; ++it) {
    const Structure a = random_structure(rng, 3, 2, 2, 0.5);
    const Formula phi = parse_formula("exists z . R0(z) & (x=z | y=z)", std::set<std::string>{});
    if (a.signature().relations()[0].arity != 1) continue;
    for_each_tuple(a.size(), 2, [&](const Tuple& t) {
      std::map<std::string, Element> env{{"x", t[0]}, {"y", t[1]}};
      EXPECT_EQ(evaluate(a, phi, env), oracle_eval(a, phi, env));
    });
  }
}

TEST(CanonicalQuery, Examples) {
  const Structure edge = make(2, {{"E", 2, {{0, 1}}}});
  EXPECT_EQ(canonical_query(edge).to_string(), "exists x0 x1 . E(x0,x1)");
  const Structure dot = make(1, {{"E", 2, {}}});
  EXPECT_EQ(canonical_query(dot).to_string(), "exists x0 . x0=x0");
}

TEST(CanonicalQuery, EvaluationMatchesHomomorphismOracle) {
  std::mt19937 rng(107);
  for (int it = 0; it < 80; ++it) {
    const Structure a = random_structure(rng, 3, 2, 2, 0.4, true);
    Structure b(a.signature(), 1 + static_cast<int>(rng() % 3));
    std::bernoulli_distribution coin(0.5);
    for (std::size_t r = 0; r < a.relations().size(); ++r)
      for_each_tuple(b.size(), a.relation(r).arity(), [&](const Tuple& t) {
        if (coin(rng)) b.add_tuple(r, t);
      });
    for (std::size_t c = 0; c < b.constants().size(); ++c) b.set_constant(c, static_cast<Element>(rng() % b.size()));
    EXPECT_EQ(evaluate(b, canonical_query(a)), !oracle_homs(a, b).empty());
  }
}

TEST(CanonicalStructure, Examples) {
  const auto loop = canonical_structure(parse_formula("exists x y . E(x,y) & x=y"), k2().signature());
  EXPECT_EQ(loop.structure, make(1, {{"E", 2, {{0, 0}}}}));
  const auto path = canonical_structure(parse_formula("exists x y z . E(x,y) & E(y,z)"), k2().signature());
  EXPECT_EQ(path.structure, make(3, {{"E", 2, {{0, 1}, {1, 2}}}}));
  EXPECT_THROW(canonical_structure(parse_formula("exists x . E(x,x) & false"), k2().signature()), InvalidInput);
}

TEST(CanonicalStructure, RoundTripsCanonicalQuery) {
  std::mt19937 rng(109);
  for (int it = 0; it < 40; ++it) {
    const Structure a = random_structure(rng, 3, 2, 2, 0.4);
    const auto back = canonical_structure(canonical_query(a), a.signature());
    EXPECT_TRUE(are_isomorphic(back.structure, a));
  }
}

TEST(CanonicalStructure, HomomorphismCharacterizesTruth) {
  std::mt19937 rng(113);
  for (int it = 0; it < 40; ++it) {
    const Structure a = random_structure(rng, 3, 2, 2, 0.5);
    FormulaGenerator gen(a.signature(), rng, 4, 0);
    for (int j = 0; j < 5; ++j) {
      const Formula phi = gen.sentence();
      EXPECT_EQ(evaluate(a, phi), has_homomorphism(canonical_structure(phi, a.signature()).structure, a));
    }
  }
}

TEST(LocalRefutation, ValueExamples) {
  const Structure empty = make(2, {{"E", 2, {}}});
  EXPECT_FALSE(local_refutation_value(empty, parse_formula("exists x y . E(x,y)")));
  const Formula loop = parse_formula("exists x . E(x,x)");
  EXPECT_TRUE(local_refutation_value(k3(), loop));
  EXPECT_FALSE(evaluate(k3(), loop));
  EXPECT_TRUE(local_refutation_value(k2(), parse_formula("exists x . x=x")));
}

TEST(LocalRefutation, TruthImpliesValue) {
  std::mt19937 rng(127);
  for (int it = 0; it < 50; ++it) {
    const Structure a = random_structure(rng, 3, 2, 2, 0.3);
    FormulaGenerator gen(a.signature(), rng, 3, 2);
    for (int j = 0; j < 10; ++j) {
      const Formula phi = gen.sentence();
      if (evaluate(a, phi)) {
        EXPECT_TRUE(local_refutation_value(a, phi));
      }
    }
  }
}

TEST(LocalRefutability, Examples) {
  const Structure full = make(2, {{"U", 1, {{0}, {1}}}});
  const auto v = is_locally_refutable(full);
  EXPECT_TRUE(v.refutable);
  EXPECT_EQ(v.diagonal, 0);
  const auto w = is_locally_refutable(k3());
  EXPECT_FALSE(w.refutable);
  ASSERT_TRUE(w.counterexample);
  EXPECT_EQ(w.counterexample->to_string(), "exists x . E(x,x)");
  EXPECT_TRUE(is_locally_refutable(make(3, {{"E", 2, {}}, {"U", 1, {}}})).refutable);
}

TEST(LocalRefutability, ConstantHandlingIsConfigurable) {
  const Structure a = make(2, {{"U", 1, {{0}, {1}}}}, {{"c", 0}, {"d", 1}});
  EXPECT_FALSE(is_locally_refutable(a).refutable);
  EXPECT_TRUE(is_locally_refutable(a, ConstantHandling::relational_only).refutable);
}

namespace {

/// Refutability by brute force over all pp sentences with at most three
/// atoms on variables {x, y} (plus constants).
bool oracle_locally_refutable(const Structure& a) {
  std::vector<Term> terms{Term::var("x"), Term::var("y")};
  for (const auto& c : a.signature().constants()) terms.push_back(Term::constant(c));
  std::vector<Formula> atoms;
  for (const auto& r : a.signature().relations())
    for_each_tuple(static_cast<int>(terms.size()), r.arity, [&](const Tuple& idx) {
      std::vector<Term> args;
      for (Element i : idx) args.push_back(terms[static_cast<std::size_t>(i)]);
      atoms.push_back(Formula::atom(r.name, args));
    });
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t j = i + 1; j < terms.size(); ++j) atoms.push_back(Formula::equality(terms[i], terms[j]));
  const std::size_t n = atoms.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      for (std::size_t k = j; k < n; ++k) {
        const Formula phi = Formula::exists({"x", "y"}, Formula::conjunction({atoms[i], atoms[j], atoms[k]}));
        if (local_refutation_value(a, phi) && !oracle_eval(a, phi)) return false;
      }
  return true;
}

}  // namespace

TEST(LocalRefutability, MatchesSentenceEnumerationOracle) {
  std::mt19937 rng(131);
  int compared = 0;
  for (int it = 0; it < 200 && compared < 40; ++it) {
    const Structure a = random_structure(rng, 3, 2, 2, 0.35, true);
    std::size_t nonempty = a.constants().size();
    for (const auto& r : a.relations()) nonempty += !r.empty();
    if (nonempty > 3) continue;
    const auto v = is_locally_refutable(a);
    EXPECT_EQ(v.refutable, oracle_locally_refutable(a));
    if (!v.refutable) {
      EXPECT_TRUE(local_refutation_value(a, *v.counterexample));
      EXPECT_FALSE(evaluate(a, *v.counterexample));
    }
    ++compared;
  }
  EXPECT_EQ(compared, 40);
}

TEST(DisjunctionElimination, PpInputUnchanged) {
  const Structure a = with_p4(2, {{0, 1}, {1, 0}});
  const Formula f = parse_formula("exists x y . E(x,y)");
  EXPECT_EQ(eliminate_disjunctions(f, "P", a), f);
}

TEST(DisjunctionElimination, Errors) {
  const Structure a = with_p4(2, {});
  EXPECT_THROW(eliminate_disjunctions(parse_formula("x=y | u=v"), "E", a), InvalidInput);
  EXPECT_THROW(eliminate_disjunctions(parse_formula("x=y | u=v"), "Q", a), InvalidInput);
  Structure broken = a;
  broken.remove_tuple(1, {0, 0, 0, 1});
  EXPECT_THROW(eliminate_disjunctions(parse_formula("x=y | u=v"), "P", broken), InvalidInput);
}

TEST(DisjunctionElimination, TwoVariableEqualityOnAllTwoElementStructures) {
  const Formula f = parse_formula("exists x y u v . (x=y | u=v)");
  const Formula g = parse_formula("exists x y u v . E(x,y) & (x=y | u=v) & E(u,v)");
  for (int mask = 0; mask < 16; ++mask) {
    std::vector<Tuple> e;
    for (int b = 0; b < 4; ++b)
      if (mask >> b & 1) e.push_back({b / 2, b % 2});
    const Structure a = with_p4(2, e);
    for (const auto& phi : {f, g}) {
      const Formula r = eliminate_disjunctions(phi, "P", a);
      EXPECT_FALSE(contains_disjunction(r));
      EXPECT_EQ(evaluate(a, r), oracle_eval(a, phi)) << phi.to_string();
    }
  }
}

TEST(DisjunctionElimination, NestedDisjunctionsOnRandomStructures) {
  const Formula phi =
      parse_formula("exists x y z . (E(x,y) | E(y,x) & x=z) & (E(y,z) | exists w . E(w,w) & w=x)");
  std::mt19937 rng(137);
  for (int it = 0; it < 20; ++it) {
    const int n = 1 + static_cast<int>(rng() % 3);
    std::vector<Tuple> e;
    for_each_tuple(n, 2, [&](const Tuple& t) {
      if (rng() % 3 == 0) e.push_back(t);
    });
    const Structure a = with_p4(n, e);
    const Formula r = eliminate_disjunctions(phi, "P", a);
    EXPECT_FALSE(contains_disjunction(r));
    EXPECT_EQ(evaluate(a, r), oracle_eval(a, phi));
  }
}

TEST(DisjunctionElimination, OpenFormulasDefineTheSameRelation) {
  const Formula phi = parse_formula("E(x,y) | x=y | exists z . E(x,z) & E(z,y)");
  std::mt19937 rng(139);
  for (int it = 0; it < 15; ++it) {
    const int n = 2 + static_cast<int>(rng() % 2);
    std::vector<Tuple> e;
    for_each_tuple(n, 2, [&](const Tuple& t) {
      if (rng() % 3 == 0) e.push_back(t);
    });
    const Structure a = with_p4(n, e);
    const Formula r = eliminate_disjunctions(phi, "P", a);
    EXPECT_TRUE(r.is_pp());
    EXPECT_EQ(extension(a, r, {"x", "y"}), extension(a, phi, {"x", "y"}));
  }
}
