#include <gtest/gtest.h>

#include "support/gen.hpp"
#include "vcsp/feasibility.hpp"
#include "vcsp/oracle.hpp"

using namespace vcsp;

namespace {

// Every feasible assignment, by plain enumeration.
std::vector<Assignment> all_feasible(const Language& lang, const Instance& inst) {
  std::vector<Assignment> out;
  for_each_tuple(lang.domain_size(), inst.num_vars, [&](const Tuple& x) {
    if (evaluate(lang, inst, x).is_finite()) out.push_back(x);
  });
  return out;
}

Language diseq2() {
  Language lang(2);
  CostFn ne("neq", 2, 2);
  ne.set({0, 1}, 0);
  ne.set({1, 0}, 0);
  lang.add(ne);
  return lang;
}

}  // namespace

TEST(FeasInstance, Cases) {
  auto [l1, i1] = feas_instance(testgen::parity_language(), testgen::parity_instance());
  EXPECT_EQ(l1, testgen::parity_language());
  EXPECT_EQ(i1, testgen::parity_instance());

  Language horn(2);
  horn.add(testgen::horn_clause("h", 2));
  CostFn soft("s", 2, 2);
  for_each_tuple(2, 2, [&](const Tuple& x) { soft.set(x, ExtRat(x[0] + x[1] + 1)); });
  horn.add(soft);
  Instance inst;
  inst.num_vars = 2;
  inst.add("h", {0, 1});
  inst.add("s", {1, 0});
  auto [l2, i2] = feas_instance(horn, inst);
  EXPECT_EQ(i2, inst);
  EXPECT_TRUE(l2.at("h")({1, 0}).is_inf());
  EXPECT_EQ(l2.at("h")({0, 0}), ExtRat(0));
  EXPECT_EQ(l2.at("s").dom_size(), 4u);
  EXPECT_TRUE(l2.at("s").is_crisp());
}

TEST(SolveCsp, Examples) {
  Language lang(2);
  Instance empty;
  empty.num_vars = 2;
  EXPECT_EQ(solve_csp(lang, empty), (Assignment{0, 0}));

  Instance ne;
  ne.num_vars = 2;
  ne.add("neq", {0, 1});
  EXPECT_EQ(solve_csp(diseq2(), ne), (Assignment{0, 1}));

  EXPECT_FALSE(solve_csp(testgen::parity_language(), testgen::parity_instance()).has_value());

  Instance none;
  EXPECT_EQ(solve_csp(lang, none), Assignment{});
}

TEST(SolveCsp, RepeatedVariableInScope) {
  Instance self;
  self.num_vars = 1;
  self.add("neq", {0, 0});
  EXPECT_FALSE(solve_csp(diseq2(), self).has_value());
}

TEST(SolveCspProperty, LexLeastAgreesWithEnumeration) {
  testgen::Rng rng(51);
  for (int i = 0; i < 300; ++i) {
    int k = rng.uniform(1, 3), n = rng.uniform(1, 6);
    Language lang = testgen::random_language(rng, k, rng.uniform(1, 3), 3, 0.5, rng.coin());
    Instance inst = testgen::random_instance(rng, lang, n, rng.uniform(0, 6));
    auto feas = all_feasible(lang, inst);
    auto x = solve_csp(lang, inst);
    ASSERT_EQ(x.has_value(), !feas.empty());
    if (x) {
      EXPECT_EQ(*x, feas.front());
    }
  }
}

TEST(SupportedLabels, Examples) {
  Language lang(2);
  lang.add(unary_set_fn("u1", 2, {1}));
  Instance none;
  none.num_vars = 2;
  auto s = supported_labels(lang, none);
  EXPECT_EQ(s, (SupportedLabels{{0, 1}, {0, 1}}));

  Instance pinned;
  pinned.num_vars = 2;
  pinned.add("u1", {0});
  s = supported_labels(lang, pinned);
  EXPECT_EQ(s[0], (std::set<Label>{1}));
  EXPECT_EQ(s[1], (std::set<Label>{0, 1}));

  s = supported_labels(testgen::parity_language(), testgen::parity_instance());
  for (const auto& d : s) EXPECT_TRUE(d.empty());
}

TEST(SupportedLabelsProperty, OracleEquivalenceAndThreads) {
  testgen::Rng rng(52);
  for (int i = 0; i < 200; ++i) {
    int k = rng.uniform(1, 3), n = rng.uniform(1, 6);
    Language lang = testgen::random_language(rng, k, rng.uniform(1, 3), 3, 0.45);
    Instance inst = testgen::random_instance(rng, lang, n, rng.uniform(0, 6));
    SupportedLabels expect(n);
    for (const auto& x : all_feasible(lang, inst))
      for (int v = 0; v < n; ++v) expect[v].insert(x[v]);
    EXPECT_EQ(supported_labels(lang, inst), expect);
    EXPECT_EQ(supported_labels(lang, inst, 3), expect);
  }
}

TEST(OneInftyMinimize, Examples) {
  Language lang(3);
  Instance none;
  none.num_vars = 2;
  auto mi = one_infty_minimize(lang, none);
  ASSERT_EQ(mi.inst.constraints.size(), 2u);
  EXPECT_EQ(mi.lang.at(mi.inst.constraints[0].fn).dom_size(), 3u);
  EXPECT_EQ(brute_opt(mi.lang, mi.inst).argmin.size(), 9u);

  auto par = one_infty_minimize(testgen::parity_language(), testgen::parity_instance());
  bool has_empty = false;
  for (const auto& c : par.inst.constraints) has_empty = has_empty || par.lang.at(c.fn).dom_size() == 0;
  EXPECT_TRUE(has_empty);
  EXPECT_TRUE(brute_opt(par.lang, par.inst).value.is_inf());
}

TEST(OneInftyMinimizeProperty, PreservesOptimumAndIsIdempotent) {
  testgen::Rng rng(53);
  for (int i = 0; i < 150; ++i) {
    int k = rng.uniform(1, 3), n = rng.uniform(1, 6);
    Language lang = testgen::random_language(rng, k, rng.uniform(1, 3), 3, 0.4);
    Instance inst = testgen::random_instance(rng, lang, n, rng.uniform(0, 6));
    auto mi = one_infty_minimize(lang, inst);
    auto a = brute_opt(lang, inst), b = brute_opt(mi.lang, mi.inst);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.argmin, b.argmin);
    EXPECT_EQ(all_feasible(lang, inst), all_feasible(mi.lang, mi.inst));
    EXPECT_EQ(supported_labels(mi.lang, mi.inst), mi.supported);
  }
}
