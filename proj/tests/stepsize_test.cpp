#include "tssqp/stepsize.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "tssqp/errors.hpp"

namespace tssqp {
namespace {

Vector scalar(double x) { return Vector::Constant(1, x); }

ConstraintOracle scalar_oracle(double (*c)(double)) {
  return [c](const Vector& x) { return scalar(c(x[0])); };
}

double identity(double x) { return x; }
double circle(double x) { return x * x - 1.0; }

// Replays the backtracking loop on a scalar constraint with plain doubles.
struct Replay {
  double alpha;
  bool safeguard;
  int backtracks;
};
Replay replay(double (*c)(double), double x, double d, double upper, double lower, double xi,
              double rho) {
  const double c0 = std::abs(c(x));
  double a = upper;
  int count = 0;
  bool ok = std::abs(c(x + a * d)) <= (1.0 - xi * a) * c0;
  while (!ok && a > lower) {
    a *= rho;
    ++count;
    if (a < lower) break;
    ok = std::abs(c(x + a * d)) <= (1.0 - xi * a) * c0;
  }
  if (ok && a >= lower) return {a, false, count};
  return {lower, true, count};
}

TEST(FixedSchedule, Beta) {
  EXPECT_DOUBLE_EQ(fixed_beta({.nu = 1, .theta = 1, .eta = 1, .horizon = 100}), 0.1);
  EXPECT_DOUBLE_EQ(fixed_beta({.nu = 1, .theta = 1, .eta = 0.1, .horizon = 1}), 0.1);
  const FixedSchedule profile = FixedSchedule::experiment_profile();
  EXPECT_EQ(fixed_beta(profile), 0.1);
  EXPECT_EQ(profile.nu, 1.0);
  EXPECT_EQ(profile.theta, 1.0);
}

TEST(FixedSchedule, AlphaRange) {
  const AlphaRange r1 = fixed_alpha_range(FixedSchedule::experiment_profile(), 0.1);
  EXPECT_DOUBLE_EQ(r1.lower, 1.0);
  EXPECT_DOUBLE_EQ(r1.upper, 1.1);
  const AlphaRange r2 = fixed_alpha_range({.nu = 0.7, .theta = 0.0}, 0.1);
  EXPECT_EQ(r2.lower, 0.7);
  EXPECT_EQ(r2.upper, 0.7);
  const AlphaRange r3 = fixed_alpha_range({.nu = 0.5, .theta = 2.0}, 0.25);
  EXPECT_EQ(r3.lower, 0.5);
  EXPECT_EQ(r3.upper, 1.0);
  EXPECT_TRUE(r3.contains(0.5));
  EXPECT_TRUE(r3.contains(1.0));
  EXPECT_FALSE(r3.contains(1.0000001));
}

TEST(AlphaRule, RoundTrip) {
  for (AlphaRule r : {AlphaRule::lower, AlphaRule::upper, AlphaRule::backtrack}) {
    EXPECT_EQ(parse_alpha_rule(to_string(r)), r);
  }
  EXPECT_THROW(parse_alpha_rule("middle"), InvalidConfig);
}

TEST(AdaptiveState, ChainedUpdates) {
  AdaptiveState s(/*b0=*/1.0, /*q0=*/1.0, /*eta=*/1.0, /*nu=*/1.0, /*theta=*/1.0);
  const auto first = s.update(3.0, 3.0);
  EXPECT_DOUBLE_EQ(s.b(), 2.0);
  EXPECT_DOUBLE_EQ(first.beta, 0.5);
  EXPECT_DOUBLE_EQ(s.q(), 2.0);
  EXPECT_DOUBLE_EQ(first.range.lower, 0.5);
  const auto second = s.update(5.0, 0.0);
  EXPECT_DOUBLE_EQ(s.b(), 3.0);
  EXPECT_DOUBLE_EQ(second.beta, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(second.range.lower, 0.5);
  EXPECT_DOUBLE_EQ(second.range.upper, 5.0 / 6.0);
}

TEST(AdaptiveState, Monotone) {
  std::mt19937_64 gen(8);
  std::exponential_distribution<double> draw(1.0);
  AdaptiveState s(1.0, 1e-9, 0.1, 1.0, 1.0);
  double b = s.b(), q = s.q(), beta = 1e300, lower = 1e300;
  for (int k = 0; k < 500; ++k) {
    const auto up = s.update(draw(gen), k % 7 == 0 ? 0.0 : draw(gen));
    EXPECT_GE(s.b(), b);
    EXPECT_GE(s.q(), q);
    EXPECT_LE(up.beta, beta);
    EXPECT_LE(up.range.lower, lower);
    EXPECT_NEAR(up.range.upper - up.range.lower, std::min(1.0 / s.b(), 1.0 / s.q()),
                1e-15 * up.range.upper);
    b = s.b();
    q = s.q();
    beta = up.beta;
    lower = up.range.lower;
  }
}

TEST(AdaptiveState, InitialBeta) {
  EXPECT_DOUBLE_EQ(AdaptiveState(4.0, 1.0, 2.0, 1.0, 1.0).initial_beta(), 0.5);
}

TEST(SafeguardedBacktrack, LinearConstraintAcceptsFullStep) {
  const auto r = safeguarded_backtrack(scalar_oracle(identity), scalar(1.0), scalar(-1.0),
                                       {.upper = 1.0, .lower = 0.01, .xi = 1e-3, .rho = 0.5});
  EXPECT_EQ(r.alpha, 1.0);
  EXPECT_FALSE(r.hit_safeguard);
  EXPECT_EQ(r.backtracks, 0);
}

TEST(SafeguardedBacktrack, QuadraticConstraintBacktracksTwice) {
  const double x = 0.1, d = 4.95;
  // Linearized feasibility: c'(x) d = -c(x).
  ASSERT_NEAR(2 * x * d, -circle(x), 1e-15);
  EXPECT_NEAR(std::abs(circle(x + d)), 24.5025, 1e-12);
  EXPECT_NEAR(std::abs(circle(x + 0.5 * d)), 5.630625, 1e-12);
  EXPECT_NEAR(std::abs(circle(x + 0.25 * d)), 0.78890625, 1e-12);
  const LineSearchParams params{.upper = 1.0, .lower = 0.01, .xi = 1e-3, .rho = 0.5};
  const auto r = safeguarded_backtrack(scalar_oracle(circle), scalar(x), scalar(d), params);
  const Replay o = replay(circle, x, d, 1.0, 0.01, 1e-3, 0.5);
  EXPECT_EQ(o.alpha, 0.25);
  EXPECT_EQ(r.alpha, o.alpha);
  EXPECT_EQ(r.hit_safeguard, o.safeguard);
  EXPECT_FALSE(r.hit_safeguard);
  EXPECT_EQ(r.backtracks, 2);
}

TEST(SafeguardedBacktrack, SafeguardBranch) {
  const LineSearchParams params{.upper = 1.0, .lower = 0.3, .xi = 1e-3, .rho = 0.5};
  const auto r = safeguarded_backtrack(scalar_oracle(circle), scalar(0.1), scalar(4.95), params);
  const Replay o = replay(circle, 0.1, 4.95, 1.0, 0.3, 1e-3, 0.5);
  EXPECT_EQ(o.alpha, 0.3);
  EXPECT_TRUE(o.safeguard);
  EXPECT_EQ(r.alpha, 0.3);
  EXPECT_TRUE(r.hit_safeguard);
  EXPECT_EQ(r.backtracks, 2);
}

TEST(SafeguardedBacktrack, StopsAtFloorWithoutSearching) {
  // upper == lower: a single test at the floor; failure returns the floor.
  const LineSearchParams params{.upper = 0.5, .lower = 0.5, .xi = 1e-3, .rho = 0.5};
  const auto r = safeguarded_backtrack(scalar_oracle(circle), scalar(0.1), scalar(4.95), params);
  EXPECT_EQ(r.alpha, 0.5);
  EXPECT_TRUE(r.hit_safeguard);
  EXPECT_EQ(r.backtracks, 0);
}

TEST(SafeguardedBacktrack, InvalidConfig) {
  const auto oracle = scalar_oracle(identity);
  const Vector x = scalar(1), d = scalar(-1);
  EXPECT_THROW(safeguarded_backtrack(oracle, x, d, {.upper = 1, .lower = 0, .xi = 1e-3, .rho = 0.5}),
               InvalidLineSearchConfig);
  EXPECT_THROW(safeguarded_backtrack(oracle, x, d, {.upper = 0.5, .lower = 1, .xi = 1e-3, .rho = 0.5}),
               InvalidLineSearchConfig);
  EXPECT_THROW(safeguarded_backtrack(oracle, x, d, {.upper = 1, .lower = 0.1, .xi = 1, .rho = 0.5}),
               InvalidLineSearchConfig);
  EXPECT_THROW(safeguarded_backtrack(oracle, x, d, {.upper = 1, .lower = 0.1, .xi = 1e-3, .rho = 1}),
               InvalidLineSearchConfig);
  EXPECT_THROW(safeguarded_backtrack(oracle, x, d, {.upper = 1, .lower = 0.1, .xi = 0, .rho = 0.5}),
               InvalidLineSearchConfig);
}

TEST(SafeguardedBacktrack, RandomizedContracts) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double x = 0.05 + 2.0 * unif(gen);
    const double d = -circle(x) / (2.0 * x) * (0.5 + unif(gen));
    const double upper = 0.1 + 3.0 * unif(gen);
    const double lower = upper * (0.01 + 0.99 * unif(gen));
    const double rho = 0.1 + 0.8 * unif(gen);
    const double xi = 1e-4 + 0.5 * unif(gen);
    const LineSearchParams params{upper, lower, xi, rho};
    const auto r = safeguarded_backtrack(scalar_oracle(circle), scalar(x), scalar(d), params);
    const Replay o = replay(circle, x, d, upper, lower, xi, rho);
    ASSERT_EQ(r.alpha, o.alpha);
    ASSERT_EQ(r.hit_safeguard, o.safeguard);
    ASSERT_EQ(r.backtracks, o.backtracks);
    ASSERT_LE(r.backtracks, max_backtracks(lower, upper, rho));
    ASSERT_GE(r.alpha, lower);
    ASSERT_LE(r.alpha, upper);
    if (!r.hit_safeguard) {
      ASSERT_LE(std::abs(circle(x + r.alpha * d)), (1.0 - xi * r.alpha) * std::abs(circle(x)));
    }
  }
}

TEST(MaxBacktracks, CeilingFormula) {
  EXPECT_EQ(max_backtracks(1.0, 1.1, 0.5), 2);   // ceil(0.1375) + 1
  EXPECT_EQ(max_backtracks(0.25, 1.0, 0.5), 3);  // exact power: 2 + 1
  EXPECT_EQ(max_backtracks(1.0, 1.0, 0.5), 1);
}

TEST(AdaptiveBacktracking, QAdvancesOnlyOnSafeguard) {
  // c(x) = x: full steps certify decrease whenever alpha <= 2 / (1 + xi).
  AdaptiveBacktracking ab(/*q0=*/1.0, /*nu=*/1.0, /*theta=*/0.0, /*xi=*/1e-3, /*rho=*/0.5);
  const auto oracle = scalar_oracle(identity);
  auto out = ab.select(oracle, scalar(3.0), 3.0, scalar(-3.0), 0.1);
  EXPECT_DOUBLE_EQ(out.q_hat, 2.0);
  EXPECT_DOUBLE_EQ(out.alpha, 0.5);
  EXPECT_FALSE(out.search.hit_safeguard);
  EXPECT_EQ(ab.q(), 1.0);

  // Tiny q: the floor nu / q_hat = 4 overshoots (|1 - 4| > 1), safeguard fires.
  AdaptiveBacktracking small(/*q0=*/std::sqrt(1.0 / 16.0 - 1e-2), 1.0, 1.0, 1e-3, 0.5);
  out = small.select(oracle, scalar(0.01), 0.01, scalar(-0.01), 0.1);
  EXPECT_DOUBLE_EQ(out.q_hat, 0.25);
  EXPECT_DOUBLE_EQ(out.range.lower, 4.0);
  EXPECT_DOUBLE_EQ(out.range.upper, 4.1);
  EXPECT_TRUE(out.search.hit_safeguard);
  EXPECT_DOUBLE_EQ(out.alpha, 4.0);
  EXPECT_DOUBLE_EQ(small.q(), 0.25);
}

}  // namespace
}  // namespace tssqp
