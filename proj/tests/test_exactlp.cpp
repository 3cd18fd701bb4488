#include <gtest/gtest.h>

#include "support/gen.hpp"
#include "support/lp_oracle.hpp"
#include "vcsp/exactlp.hpp"

using namespace vcsp;
using namespace vcsp::lp;

namespace {
std::vector<Rational> row(std::initializer_list<long> xs) {
  std::vector<Rational> r;
  for (long x : xs) r.emplace_back(x);
  return r;
}
}  // namespace

TEST(SolveLp, SimpleOptimum) {
  LinearProgram lp(1);
  lp.objective[0] = Rational(1);
  lp.add_row(row({1}), Relation::GreaterEq, Rational(1));
  auto out = solve_lp(lp);
  ASSERT_TRUE(is_optimal(out));
  const auto& opt = std::get<Optimal>(out);
  EXPECT_EQ(opt.value, Rational(1));
  EXPECT_EQ(opt.primal[0], Rational(1));
  EXPECT_EQ(opt.dual[0], Rational(1));
  EXPECT_TRUE(verify_outcome(lp, out));
}

TEST(SolveLp, FarkasForContradictoryBounds) {
  LinearProgram lp(1);
  lp.nonneg[0] = false;
  lp.add_row(row({1}), Relation::LessEq, Rational(-1));
  lp.add_row(row({1}), Relation::GreaterEq, Rational(0));
  auto out = solve_lp(lp);
  ASSERT_TRUE(is_infeasible(out));
  const auto& y = std::get<Infeasible>(out).farkas;
  // the two rows combine to 0 >= 1
  EXPECT_EQ(y[0], -y[1]);
  EXPECT_GT(y[1], Rational(0));
  EXPECT_TRUE(verify_outcome(lp, out));
}

TEST(SolveLp, UnboundedRay) {
  LinearProgram lp(2);
  lp.objective = row({-1, 0});
  lp.add_row(row({1, -1}), Relation::LessEq, Rational(2));
  auto out = solve_lp(lp);
  ASSERT_TRUE(is_unbounded(out));
  EXPECT_TRUE(verify_outcome(lp, out));
}

TEST(SolveLp, EmptyRowSetAndConstant) {
  LinearProgram lp(2);
  lp.objective = row({2, 3});
  lp.objective_constant = Rational(5, 2);
  auto out = solve_lp(lp);
  ASSERT_TRUE(is_optimal(out));
  EXPECT_EQ(std::get<Optimal>(out).value, Rational(5, 2));
  EXPECT_TRUE(verify_outcome(lp, out));
}

TEST(SolveLp, RedundantEqualities) {
  LinearProgram lp(2);
  lp.objective = row({1, 2});
  lp.add_row(row({1, 1}), Relation::Equal, Rational(1));
  lp.add_row(row({2, 2}), Relation::Equal, Rational(2));
  lp.add_row(row({0, 0}), Relation::Equal, Rational(0));
  auto out = solve_lp(lp);
  ASSERT_TRUE(is_optimal(out));
  EXPECT_EQ(std::get<Optimal>(out).value, Rational(1));
  EXPECT_TRUE(verify_outcome(lp, out));
}

TEST(SolveLp, ZeroRowWithPositiveRhsIsInfeasible) {
  LinearProgram lp(0);
  lp.add_row({}, Relation::Equal, Rational(1));
  auto out = solve_lp(lp);
  ASSERT_TRUE(is_infeasible(out));
  EXPECT_TRUE(verify_outcome(lp, out));
}

TEST(SolveLp, CellCapThrows) {
  LinearProgram lp(10);
  for (int i = 0; i < 10; ++i) lp.add_row(std::vector<Rational>(10, Rational(1)), Relation::LessEq, Rational(1));
  Caps caps;
  caps.lp_cells = 50;
  EXPECT_THROW(solve_lp(lp, caps), ResourceError);
}

TEST(SolveLp, RowLengthMismatchThrows) {
  LinearProgram lp(2);
  EXPECT_THROW(lp.add_row(row({1}), Relation::LessEq, Rational(0)), std::invalid_argument);
}

TEST(VerifyOutcome, RejectsTamperedCertificates) {
  LinearProgram lp(2);
  lp.objective = row({1, 1});
  lp.add_row(row({1, 1}), Relation::GreaterEq, Rational(2));
  auto out = solve_lp(lp);
  ASSERT_TRUE(is_optimal(out));
  auto bad = std::get<Optimal>(out);
  bad.primal[0] += Rational(1);
  EXPECT_FALSE(verify_outcome(lp, LPOutcome{bad}));
  auto bad_dual = std::get<Optimal>(out);
  bad_dual.dual[0] = Rational(-1);
  EXPECT_FALSE(verify_outcome(lp, LPOutcome{bad_dual}));

  LinearProgram inf(1);
  inf.add_row(row({1}), Relation::LessEq, Rational(-1));
  auto fo = solve_lp(inf);
  ASSERT_TRUE(is_infeasible(fo));
  auto neg = std::get<Infeasible>(fo);
  EXPECT_FALSE(verify_outcome(inf, LPOutcome{Infeasible{{Rational(1)}}}));
  neg.farkas[0] = -neg.farkas[0];
  EXPECT_FALSE(verify_outcome(inf, LPOutcome{neg}));
  EXPECT_FALSE(verify_outcome(inf, LPOutcome{Infeasible{{}}}));
}

TEST(SolveLpProperty, AgreesWithVertexEnumeration) {
  testgen::Rng rng(101);
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 300; ++i) {
    LinearProgram lp = lporacle::random_lp(rng);
    auto out = solve_lp(lp);
    ASSERT_TRUE(verify_outcome(lp, out)) << dump_lp(lp);
    auto truth = lporacle::solve(lp);
    switch (truth.kind) {
      case lporacle::Kind::Infeasible:
        EXPECT_TRUE(is_infeasible(out)) << dump_lp(lp);
        ++counts[0];
        break;
      case lporacle::Kind::Unbounded:
        EXPECT_TRUE(is_unbounded(out)) << dump_lp(lp);
        ++counts[1];
        break;
      case lporacle::Kind::Optimal:
        ASSERT_TRUE(is_optimal(out)) << dump_lp(lp);
        EXPECT_EQ(std::get<Optimal>(out).value, truth.value) << dump_lp(lp);
        ++counts[2];
        break;
    }
  }
  // the generator must exercise every outcome class
  EXPECT_GT(counts[0], 10);
  EXPECT_GT(counts[1], 10);
  EXPECT_GT(counts[2], 10);
}

// Either a certified point or a certified Farkas vector exists, never both:
// a Farkas vector y and feasible x would give 0 >= y.Ax >= y.b > 0.
TEST(SolveLpProperty, OnlyOneAlternativeCertifiable) {
  testgen::Rng rng(202);
  for (int i = 0; i < 200; ++i) {
    LinearProgram lp = lporacle::random_lp(rng, 4, 6);
    LinearProgram feas = lp;
    for (auto& c : feas.objective) c = Rational(0);
    auto out = solve_lp(feas);
    ASSERT_TRUE(verify_outcome(feas, out));
    bool has_point = lporacle::solve(feas).kind != lporacle::Kind::Infeasible;
    EXPECT_EQ(is_infeasible(out), !has_point);
    EXPECT_EQ(is_infeasible(solve_lp(lp)), !has_point);
  }
}

TEST(SolveLpProperty, Deterministic) {
  testgen::Rng rng(303);
  for (int i = 0; i < 50; ++i) {
    LinearProgram lp = lporacle::random_lp(rng);
    auto a = solve_lp(lp), b = solve_lp(lp);
    ASSERT_EQ(a.index(), b.index());
    if (is_optimal(a)) {
      EXPECT_EQ(std::get<Optimal>(a).primal, std::get<Optimal>(b).primal);
      EXPECT_EQ(std::get<Optimal>(a).dual, std::get<Optimal>(b).dual);
    } else if (is_infeasible(a)) {
      EXPECT_EQ(std::get<Infeasible>(a).farkas, std::get<Infeasible>(b).farkas);
    } else {
      EXPECT_EQ(std::get<Unbounded>(a).ray, std::get<Unbounded>(b).ray);
    }
  }
}

TEST(DumpLp, Format) {
  LinearProgram lp(2);
  lp.objective = row({1, -1});
  lp.nonneg[1] = false;
  lp.add_row({Rational(1, 2), Rational(0)}, Relation::LessEq, Rational(3));
  EXPECT_EQ(dump_lp(lp), "lp 2 1\nminimize 1 -1 + 0\nfree 1\nrow 1/2 0 <= 3\n");
}
