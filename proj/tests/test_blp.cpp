#include <gtest/gtest.h>

#include "support/gen.hpp"
#include "vcsp/blp.hpp"
#include "vcsp/oracle.hpp"

using namespace vcsp;

TEST(BuildBlp, UnaryPinned) {
  Language lang(2);
  lang.add(unary_set_fn("u0", 2, {0}));
  Instance inst;
  inst.num_vars = 1;
  inst.add("u0", {0});
  auto r = blp_value(lang, inst);
  EXPECT_EQ(r.value, ExtRat(0));
  ASSERT_TRUE(r.solution);
  EXPECT_EQ(r.solution->alpha[0], (std::vector<Rational>{Rational(1), Rational(0)}));
}

TEST(BuildBlp, BinaryCounts) {
  Language lang(2);
  testgen::Rng rng(1);
  lang.add(testgen::random_submodular_binary(rng, "f", true));
  Instance inst;
  inst.num_vars = 2;
  inst.add("f", {0, 1});
  auto prog = build_blp(lang, inst);
  EXPECT_EQ(prog.lp.num_vars, 8u);  // 4 mu + 4 alpha
  std::size_t marginal = 0, simplex = 0;
  for (const auto& row : prog.lp.rows) (row.rhs.is_zero() ? marginal : simplex)++;
  EXPECT_EQ(marginal, 4u);
  EXPECT_EQ(simplex, 3u);
}

TEST(BuildBlp, EmptyDomIsStructurallyInfeasible) {
  Language lang(2);
  lang.add(CostFn("none", 1, 2));
  Instance inst;
  inst.num_vars = 1;
  inst.add("none", {0});
  auto r = blp_value(lang, inst);
  EXPECT_TRUE(r.value.is_inf());
  EXPECT_TRUE(r.farkas.has_value());
}

TEST(BlpValue, CrispValuesAreZeroOrInfinity) {
  testgen::Rng rng(2);
  for (int i = 0; i < 40; ++i) {
    Language lang = testgen::random_language(rng, 2, 2, 2, 0.4, true);
    Instance inst = testgen::random_instance(rng, lang, 3, 4);
    auto r = blp_value(lang, inst);
    EXPECT_TRUE(r.value.is_inf() || r.value == ExtRat(0));
  }
}

TEST(BlpValue, ParityGap) {
  Language lang = testgen::parity_language();
  Instance inst = testgen::parity_instance();
  auto raw = blp_value(lang, inst);
  ASSERT_TRUE(raw.solution);
  EXPECT_EQ(raw.value, ExtRat(0));
  // the half-half point is feasible for the raw relaxation
  BlpSolution half;
  half.value = ExtRat(0);
  half.alpha.assign(3, {Rational(1, 2), Rational(1, 2)});
  for (const auto& c : inst.constraints) {
    std::vector<std::pair<Tuple, Rational>> mu;
    for (const auto& [x, v] : lang.at(c.fn).entries()) mu.emplace_back(x, Rational(1, 2));
    half.mu.push_back(mu);
  }
  EXPECT_TRUE(check_blp_solution(lang, inst, half));
  EXPECT_TRUE(brute_opt(lang, inst).value.is_inf());
  auto mi = one_infty_minimize(lang, inst);
  EXPECT_TRUE(blp_value(mi.lang, mi.inst).value.is_inf());
}

TEST(CheckBlpSolution, RejectsBrokenMarginals) {
  Language lang = testgen::parity_language();
  Instance inst = testgen::parity_instance();
  auto r = blp_value(lang, inst);
  ASSERT_TRUE(r.solution);
  BlpSolution bad = *r.solution;
  bad.alpha[0][0] += Rational(1, 3);
  bad.alpha[0][1] -= Rational(1, 3);
  EXPECT_FALSE(check_blp_solution(lang, inst, bad));
  BlpSolution off = *r.solution;
  off.value = ExtRat(1);
  EXPECT_FALSE(check_blp_solution(lang, inst, off));
}

// BLP(I) <= BLP(I-bar) <= Opt(I) on arbitrary small instances.
TEST(BlpProperty, RelaxationBoundAndMonotonicity) {
  testgen::Rng rng(3);
  for (int i = 0; i < 120; ++i) {
    int k = rng.uniform(1, 3), n = rng.uniform(1, 5);
    Language lang = testgen::random_language(rng, k, rng.uniform(1, 3), 2, 0.35);
    Instance inst = testgen::random_instance(rng, lang, n, rng.uniform(0, 5));
    ExtRat raw = blp_value(lang, inst).value;
    auto mi = one_infty_minimize(lang, inst);
    ExtRat bar = blp_value(mi.lang, mi.inst).value;
    ExtRat opt = brute_opt(lang, inst).value;
    EXPECT_LE(raw, bar);
    EXPECT_LE(bar, opt);
  }
}

TEST(SolveVcsp, EmptyInstance) {
  Language lang(3);
  Instance inst;
  inst.num_vars = 3;
  auto r = solve_vcsp(lang, inst);
  EXPECT_EQ(r.value, ExtRat(0));
  EXPECT_EQ(r.assignment, (Assignment{0, 0, 0}));
  EXPECT_TRUE(r.certified);
}

TEST(SolveVcsp, ParityInfeasible) {
  auto r = solve_vcsp(testgen::parity_language(), testgen::parity_instance());
  EXPECT_TRUE(r.value.is_inf());
  EXPECT_FALSE(r.assignment.has_value());
  EXPECT_TRUE(r.certified);
}

TEST(SolveVcsp, RawParityIsNotCertified) {
  SolveOptions opts;
  opts.raw = true;
  auto r = solve_vcsp(testgen::parity_language(), testgen::parity_instance(), opts);
  EXPECT_EQ(r.value, ExtRat(0));
  EXPECT_FALSE(r.certified);
  EXPECT_FALSE(r.diagnostics.empty());
}

TEST(SolveVcspProperty, SubmodularCertifiedOptimal) {
  testgen::Rng rng(4);
  for (int i = 0; i < 60; ++i) {
    auto [lang, inst] = testgen::random_submodular_instance(rng, rng.uniform(1, 7), rng.uniform(1, 10));
    auto opt = brute_opt(lang, inst);
    for (unsigned threads : {1u, 2u}) {
      SolveOptions opts;
      opts.threads = threads;
      auto r = solve_vcsp(lang, inst, opts);
      EXPECT_EQ(r.value, opt.value);
      EXPECT_TRUE(r.certified) << r.diagnostics;
      if (opt.value.is_finite()) {
        ASSERT_TRUE(r.assignment);
        // soundness chain: evaluate(x) = v* <= Opt <= evaluate(x)
        EXPECT_EQ(evaluate(lang, inst, *r.assignment), r.value);
        EXPECT_LE(r.value, opt.value);
        EXPECT_LE(opt.value, evaluate(lang, inst, *r.assignment));
      }
    }
  }
}

// Certification is sound even for languages outside any tractable class.
TEST(SolveVcspProperty, CertifiedImpliesOptimal) {
  testgen::Rng rng(5);
  int certified = 0;
  for (int i = 0; i < 80; ++i) {
    int k = rng.uniform(2, 3), n = rng.uniform(1, 5);
    Language lang = testgen::random_language(rng, k, 2, 2, 0.3);
    Instance inst = testgen::random_instance(rng, lang, n, rng.uniform(1, 5));
    auto r = solve_vcsp(lang, inst);
    if (!r.certified) continue;
    ++certified;
    auto opt = brute_opt(lang, inst);
    EXPECT_EQ(r.value, opt.value);
    if (r.assignment) {
      EXPECT_EQ(evaluate(lang, inst, *r.assignment), opt.value);
    }
  }
  EXPECT_GT(certified, 0);
}
