#include <gtest/gtest.h>

#include "support/gen.hpp"
#include "vcsp/io.hpp"
#include "vcsp/model.hpp"

using namespace vcsp;

TEST(Evaluate, EmptyConstraintListIsZero) {
  Language lang(2);
  Instance inst;
  inst.num_vars = 3;
  EXPECT_EQ(evaluate(lang, inst, Assignment{0, 1, 1}), ExtRat(0));
}

TEST(Evaluate, HornClauseViolation) {
  Language lang(2);
  lang.add(testgen::horn_clause("h", 3));
  Instance inst;
  inst.num_vars = 3;
  inst.add("h", {0, 1, 2});
  EXPECT_TRUE(evaluate(lang, inst, Assignment{1, 1, 0}).is_inf());
  EXPECT_EQ(evaluate(lang, inst, Assignment{1, 1, 1}), ExtRat(0));
}

TEST(Evaluate, RepeatedUnary) {
  Language lang(2);
  lang.add(unary_set_fn("u0", 2, {0}));
  Instance inst;
  inst.num_vars = 1;
  inst.add("u0", {0});
  inst.add("u0", {0});
  EXPECT_EQ(evaluate(lang, inst, Assignment{0}), ExtRat(0));
  EXPECT_TRUE(evaluate(lang, inst, Assignment{1}).is_inf());
}

TEST(Evaluate, Errors) {
  Language lang(2);
  lang.add(unary_set_fn("u0", 2, {0}));
  Instance inst;
  inst.num_vars = 2;
  inst.add("missing", {0});
  EXPECT_THROW(evaluate(lang, inst, Assignment{0, 0}), ModelError);
  Instance bad_arity;
  bad_arity.num_vars = 2;
  bad_arity.add("u0", {0, 1});
  EXPECT_THROW(evaluate(lang, bad_arity, Assignment{0, 0}), ModelError);
  Instance ok;
  ok.num_vars = 2;
  EXPECT_THROW(evaluate(lang, ok, Assignment{0}), ModelError);
  EXPECT_THROW(evaluate(lang, ok, Assignment{0, 2}), ModelError);
}

TEST(DomFn, Cases) {
  CostFn f("f", 2, 2);
  for_each_tuple(2, 2, [&](const Tuple& x) { f.set(x, ExtRat(Rational(x[0] + 3 * x[1]))); });
  EXPECT_TRUE(f.is_finite_valued());
  CostFn d = dom_fn(f);
  EXPECT_EQ(d.dom_size(), 4u);
  EXPECT_TRUE(d.is_crisp());

  CostFn h = dom_fn(testgen::horn_clause("h", 3));
  for_each_tuple(2, 3, [&](const Tuple& x) {
    bool bad = x == Tuple{1, 1, 0};
    EXPECT_EQ(h(x).is_inf(), bad);
    if (!bad) {
      EXPECT_EQ(h(x), ExtRat(0));
    }
  });

  CostFn empty("e", 2, 3);
  EXPECT_EQ(dom_fn(empty).dom_size(), 0u);
}

TEST(FeasLanguage, CrispIsFixedPoint) {
  Language lang = testgen::parity_language();
  EXPECT_EQ(feas_language(lang), lang);
}

TEST(FeasLanguage, IdempotentOnRandomLanguages) {
  testgen::Rng rng(21);
  for (int i = 0; i < 50; ++i) {
    Language lang = testgen::random_language(rng, rng.uniform(1, 3), rng.uniform(1, 4), 3, 0.3);
    Language once = feas_language(lang);
    EXPECT_EQ(feas_language(once), once);
    for (const auto& [name, f] : lang.functions()) {
      const CostFn& g = once.at(name);
      EXPECT_TRUE(g.is_crisp());
      EXPECT_EQ(g.dom_size(), f.dom_size());
    }
  }
}

TEST(FeasLanguage, FiniteValuedBecomesConstantZero) {
  Language lang(2);
  testgen::Rng rng(2);
  lang.add(testgen::random_submodular_binary(rng, "f", true));
  lang.add(testgen::random_unary(rng, "u", 2, 0.0));
  Language feas = feas_language(lang);
  for (const auto& [name, g] : feas.functions()) {
    EXPECT_TRUE(g.is_finite_valued());
    EXPECT_TRUE(g.is_crisp());
  }
}

// Appending a constraint never lowers the value; finiteness iff all tuples in dom.
TEST(EvaluateProperty, MonotoneAndFiniteIffInDom) {
  testgen::Rng rng(31);
  for (int iter = 0; iter < 200; ++iter) {
    int k = rng.uniform(1, 3), n = rng.uniform(1, 5);
    Language lang = testgen::random_language(rng, k, 3, 3, 0.3);
    Instance inst = testgen::random_instance(rng, lang, n, rng.uniform(0, 5));
    Assignment x(n);
    for (auto& a : x) a = rng.uniform(0, k - 1);
    ExtRat before = evaluate(lang, inst, x);
    bool all_in_dom = true;
    for (const auto& c : inst.constraints) {
      Tuple t;
      for (int v : c.scope) t.push_back(x[v]);
      all_in_dom = all_in_dom && lang.at(c.fn).in_dom(t);
    }
    EXPECT_EQ(before.is_finite(), all_in_dom);
    Instance more = inst;
    Instance extra = testgen::random_instance(rng, lang, n, 1);
    more.constraints.push_back(extra.constraints[0]);
    // values are nonnegative in random_language tables
    EXPECT_GE(evaluate(lang, more, x), before);
  }
}

TEST(CostFn, SettingInfinityErases) {
  CostFn f("f", 1, 2);
  f.set({0}, ExtRat(3));
  f.set({0}, ExtRat::infinity());
  EXPECT_EQ(f.dom_size(), 0u);
  EXPECT_THROW(f.set({2}, ExtRat(1)), ModelError);
  EXPECT_THROW(f.set({0, 0}, ExtRat(1)), ModelError);
  EXPECT_THROW(CostFn("bad name", 1, 2), ModelError);
}

TEST(Language, DuplicateAndReuse) {
  Language lang(2);
  lang.add(unary_set_fn("u", 2, {0}));
  EXPECT_THROW(lang.add(unary_set_fn("u", 2, {1})), ModelError);
  EXPECT_NO_THROW(lang.add_or_reuse(unary_set_fn("u", 2, {0})));
  EXPECT_THROW(lang.add_or_reuse(unary_set_fn("u", 2, {1})), ModelError);
  EXPECT_THROW(lang.add(unary_set_fn("v", 3, {0})), ModelError);
}

// ---- text formats -----------------------------------------------------------

TEST(Io, ParseLanguage) {
  auto lang = parse_language(
      "# comment\n"
      "domain 2\n"
      "function f 2\n"
      "  0 0 : 1/2   # half\n"
      "  1 1 : -3\n"
      "  0 1 : inf\n"
      "end\n");
  EXPECT_EQ(lang.domain_size(), 2);
  const CostFn& f = lang.at("f");
  EXPECT_EQ(f({0, 0}), ExtRat(Rational(1, 2)));
  EXPECT_EQ(f({1, 1}), ExtRat(-3));
  EXPECT_TRUE(f({0, 1}).is_inf());
  EXPECT_TRUE(f({1, 0}).is_inf());
}

TEST(Io, ParseErrorsCarryPosition) {
  try {
    parse_language("domain 2\nfunction f 2\n  0 0 0 : 1\nend\n", "lang.txt");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 9);
    EXPECT_NE(std::string(e.what()).find("lang.txt:3:9"), std::string::npos);
  }
  try {
    parse_language("domain 2\nfunction f 1\n  5 : 1\nend\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 3);
  }
  EXPECT_THROW(parse_language("domain 2\nfunction f 1\n 0 : 1\n 0 : 2\nend\n"), ParseError);
  EXPECT_THROW(parse_language("domain 2\nfunction f 1\n 0 : 1\n"), ParseError);
  EXPECT_THROW(parse_language("function f 1\nend\n"), ParseError);
  EXPECT_THROW(parse_language("domain 2\nfunction f 1\n 0 : x\nend\n"), ParseError);
  EXPECT_THROW(parse_language("domain 2\nfunction f 1\nend\nfunction f 1\nend\n"), ParseError);

  Language lang = parse_language("domain 2\nfunction f 1\n 0 : 1\nend\n");
  EXPECT_THROW(parse_instance("vars 2\nconstraint g 0\n", &lang), ParseError);
  EXPECT_THROW(parse_instance("vars 2\nconstraint f 0 1\n", &lang), ParseError);
  EXPECT_THROW(parse_instance("vars 2\nconstraint f 2\n", &lang), ParseError);
  EXPECT_THROW(parse_instance("constraint f 0\n", &lang), ParseError);
}

TEST(Io, RoundTripRandom) {
  testgen::Rng rng(41);
  for (int i = 0; i < 100; ++i) {
    Language lang = testgen::random_language(rng, rng.uniform(1, 4), rng.uniform(1, 4), 3, 0.4);
    Instance inst = testgen::random_instance(rng, lang, rng.uniform(1, 6), rng.uniform(0, 6));
    EXPECT_EQ(parse_language(print_language(lang)), lang);
    EXPECT_EQ(parse_instance(print_instance(inst), &lang), inst);
  }
}

TEST(Io, BigRationalsRoundTrip) {
  Language lang(1);
  CostFn f("f", 1, 1);
  f.set({0}, ExtRat(Rational::parse("-98765432109876543210987654321/12345678901234567")));
  lang.add(f);
  EXPECT_EQ(parse_language(print_language(lang)), lang);
}
