#include "fixtures.hpp"
#include "remest/constrained.hpp"
#include "remest/errors.hpp"
#include "remest/evaluation.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace remest;
using remest::fixtures::main_config;
using remest::fixtures::symmetric_config;

namespace {

const SystemModel& main_model() {
  static const SystemModel m(main_config());
  return m;
}

const SystemModel& sym_model() {
  static const SystemModel m(symmetric_config());
  return m;
}

}  // namespace

TEST(IntersectionStep, TwoLineArithmetic) {
  const auto r = intersection_step({0, 10, 0.5, 10}, {10, 12, 0.1, 13});
  EXPECT_NEAR(r.lambda_next, 5.0, 1e-12);
  EXPECT_NEAR(r.L_tilde, 12.5, 1e-12);
}

TEST(IntersectionStep, ParallelTangentsAreDegenerate) {
  EXPECT_THROW(intersection_step({0, 1, 0.3, 1}, {2, 2, 0.3, 2.6}), DegenerateSlopes);
}

TEST(IntersectionStep, RecoversCornerOfSyntheticCurve) {
  // L(lambda) = min(1 + 0.4 lambda, 3 + 0.1 lambda): corner at 20/3.
  auto curve = [](double l) {
    const double a = 1 + 0.4 * l, b = 3 + 0.1 * l;
    return a <= b ? CurvePoint{l, 1, 0.4, a} : CurvePoint{l, 3, 0.1, b};
  };
  for (double lo : {0.0, 2.0, 6.0})
    for (double hi : {7.0, 15.0, 100.0}) {
      const auto r = intersection_step(curve(lo), curve(hi));
      EXPECT_NEAR(r.lambda_next, 20.0 / 3.0, 1e-12);
      EXPECT_NEAR(r.L_tilde, curve(r.lambda_next).L, 1e-12);
      EXPECT_GE(r.lambda_next, lo);
      EXPECT_LE(r.lambda_next, hi);
    }
}

TEST(Bisection, IterationCountIsLogarithmic) {
  const auto r = bisection_solve(main_model(), 0.1, 1000.0, 1e-3);
  EXPECT_EQ(r.trace.iterations(), static_cast<int>(std::ceil(std::log2(1000.0 / 1e-3))));
  EXPECT_EQ(r.trace.method, SearchTrace::Method::Bisection);
  for (std::size_t i = 1; i < r.trace.entries.size(); ++i) {
    const auto& a = r.trace.entries[i - 1];
    const auto& b = r.trace.entries[i];
    EXPECT_GE(b.lo, a.lo);
    EXPECT_LE(b.hi, a.hi);
    EXPECT_LT(b.hi - b.lo, a.hi - a.lo);
    EXPECT_GE(b.point.lambda, a.lo);
    EXPECT_LE(b.point.lambda, a.hi);
  }
}

TEST(Bisection, SlackConstraintReturnsZero) {
  const auto r = bisection_solve(main_model(), 0.5, 1000.0, 1e-3);
  EXPECT_EQ(r.lambda_star, 0.0);
  EXPECT_EQ(r.trace.iterations(), 0);
}

TEST(Bisection, BadBracket) {
  EXPECT_THROW(bisection_solve(main_model(), 0.1, 0.5, 1e-3), BadBracket);
}

TEST(SolveCmdp, SlackConstraintIsDeterministicAtZero) {
  const auto sol = solve_cmdp(main_model(), 1.0, 1000.0);
  EXPECT_EQ(sol.kind, ConstrainedSolution::Kind::Deterministic);
  EXPECT_EQ(sol.lambda_star, 0.0);
  EXPECT_EQ(sol.policy, DeterministicPolicy::reactive(main_model()));
}

TEST(SolveCmdp, BadBracket) {
  EXPECT_THROW(solve_cmdp(main_model(), 0.1, 0.5), BadBracket);
}

TEST(SolveCmdp, MixtureMeetsBudgetAndAgreesWithBisection) {
  const auto& m = main_model();
  const auto sol = solve_cmdp(m, 0.1, 1000.0);
  ASSERT_EQ(sol.kind, ConstrainedSolution::Kind::Mixture);
  EXPECT_NEAR(sol.achieved_F, 0.1, 1e-6);
  EXPECT_GE(sol.mixture.p, 0.0);
  EXPECT_LE(sol.mixture.p, 1.0);
  EXPECT_LE(stationary_metrics(m, sol.mixture.policy_plus).F, 0.1);
  EXPECT_GE(stationary_metrics(m, sol.mixture.policy_minus).F, 0.1);
  for (int s : sol.mixture.differing_states) EXPECT_TRUE(m.is_error(s));
  EXPECT_TRUE(check_switching_structure(sol.mixture.policy_minus, m).empty());
  EXPECT_TRUE(check_switching_structure(sol.mixture.policy_plus, m).empty());

  const auto bis = bisection_solve(m, 0.1, 1000.0, 1e-3);
  EXPECT_NEAR(bis.lambda_star, sol.lambda_star, 1e-3);

  // Every intersection iterate lies inside the interval it was drawn from.
  double lo = 0.0, hi = 1000.0;
  for (const auto& e : sol.trace.entries) {
    EXPECT_GE(e.point.lambda, lo - 1e-12);
    EXPECT_LE(e.point.lambda, hi + 1e-12);
    EXPECT_GE(e.lo, lo);
    EXPECT_LE(e.hi, hi);
    lo = e.lo;
    hi = e.hi;
  }
}

TEST(SolveCmdp, AchievedFrequencyNeverExceedsBudget) {
  for (double f : {0.05, 0.12, 0.2, 0.3}) {
    const auto sol = solve_cmdp(main_model(), f, 1000.0);
    EXPECT_LE(sol.achieved_F, f + 1e-6) << f;
    if (sol.kind == ConstrainedSolution::Kind::Mixture) EXPECT_NEAR(sol.achieved_F, f, 1e-6);
  }
}

TEST(SolveCmdp, IterationCountIndependentOfEpsilon) {
  int count = -1;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    CmdpOptions o;
    o.epsilon_mix = eps;
    const auto sol = solve_cmdp(main_model(), 0.1, 1000.0, o);
    if (count < 0) count = sol.trace.iterations();
    EXPECT_EQ(sol.trace.iterations(), count);
  }
  EXPECT_LE(count, 8);
}

TEST(SolveCmdp, SymmetricMixtureThresholdsDifferByOne) {
  for (double f : {0.08, 0.12, 0.2}) {
    const auto sol = solve_cmdp(sym_model(), f, 1000.0);
    ASSERT_EQ(sol.kind, ConstrainedSolution::Kind::Mixture) << f;
    const auto minus = sol.thresholds_minus.distinct();
    const auto plus = sol.thresholds_plus.distinct();
    ASSERT_EQ(minus.size(), 1u);
    ASSERT_EQ(plus.size(), 1u);
    EXPECT_EQ(*plus.begin(), *minus.begin() + 1) << f;
  }
}

TEST(BuildMixture, LinearInitialisationAndEndpoints) {
  const auto& m = sym_model();
  const auto a = spi_solve(m, 2.0).policy;
  const auto b = spi_solve(m, 30.0).policy;
  const double Fa = stationary_metrics(m, a).F;
  const double Fb = stationary_metrics(m, b).F;
  ASSERT_GT(Fa, Fb);
  const double f = 0.5 * (Fa + Fb);
  const auto mix = build_mixture(m, a, b, f);
  EXPECT_NEAR(mix.p_linear, 0.5, 1e-12);
  EXPECT_NEAR(stationary_metrics(m, mix).F, f, 1e-6);
  EXPECT_EQ(build_mixture(m, a, b, Fb).p, 0.0);
  EXPECT_THROW(build_mixture(m, a, b, Fa + 0.01), InfeasiblePair);
  EXPECT_THROW(build_mixture(m, b, a, f), InfeasiblePair);
}
