// Copyright 2026 The entropy-gap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "entropy_gap/critical_times.hpp"

using namespace egap;

namespace {

// 50-digit reference values for the fiducial parameters.
constexpr double kUEarly = 333.29957820616766;
constexpr double kULate = 0.067500002767922216;
constexpr double kUNegative = -333.36707820893558;
constexpr double kTcr1 = 405.12306236159151;
constexpr double kTcr2 = 48773046888278.98;
constexpr double kTcr2OverT0 = 3251.5364592185986;
constexpr double kApproxTcr2OverT0 = 3251.5368592186150;
constexpr double kRelErr1 = 3.0376538e-4;
constexpr double kRelErr2 = 1.2301877e-7;
constexpr double kThreshold = 28511124.404425964;
constexpr double kResidualAtMin = -28496124.404425964;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Three real roots of 2u^3 - (2/3) alpha u + beta by the trigonometric
// formula, sorted descending. Only accurate for moderate alpha.
std::vector<double> trig_roots(double alpha, double beta) {
  const double p = -alpha / 3.0;  // u^3 + p u + q
  const double q = beta / 2.0;
  const double m = 2.0 * std::sqrt(-p / 3.0);
  const double theta = std::acos((3.0 * q / (2.0 * p)) * std::sqrt(-3.0 / p)) / 3.0;
  std::vector<double> r;
  for (int k = 0; k < 3; ++k) r.push_back(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0));
  std::sort(r.begin(), r.end(), std::greater<>());
  return r;
}

ModelParams from_groups(double alpha, double beta) {
  return make_params(Kelvin(3.0 * alpha), Years(1.5e10 / beta), Years(1.5e10), Kelvin(3.0));
}

}  // namespace

TEST(Cubic, FiducialThresholdAndMinimum) {
  const auto d = to_dimensionless(fiducial_params());
  EXPECT_LE(rel(pair_threshold(d), kThreshold), 1e-14);
  EXPECT_DOUBLE_EQ(cubic_min_location(d), std::sqrt(1e6 / 3.0) / 3.0);
  EXPECT_LE(rel(cubic_residual(d, cubic_min_location(d)), kResidualAtMin), 1e-12);
  EXPECT_TRUE(pair_exists(d));
}

TEST(Cubic, SlopeVanishesAtMinimum) {
  for (const double alpha : {1.0, 30.0, 1e6 / 3.0, 1e8}) {
    const auto d = DimensionlessParams::make(alpha, 1.0);
    const double u = cubic_min_location(d);
    EXPECT_LE(std::abs(cubic_slope(d, u)), 1e-12 * alpha);
  }
}

TEST(CriticalTimes, FiducialRoots) {
  const auto r = solve_critical_times(fiducial_params());
  ASSERT_TRUE(r.exists_pair);
  ASSERT_EQ(r.u_roots.size(), 3u);
  EXPECT_LE(rel(r.u_roots[0].u, kUEarly), 1e-14);
  EXPECT_LE(rel(r.u_roots[1].u, kULate), 1e-14);
  EXPECT_LE(rel(r.u_roots[2].u, kUNegative), 1e-14);
  EXPECT_EQ(r.u_roots[0].kind, RootKind::physical_early);
  EXPECT_EQ(r.u_roots[1].kind, RootKind::physical_late);
  EXPECT_EQ(r.u_roots[2].kind, RootKind::unphysical_negative);
  EXPECT_LE(rel(r.t_cr1->value(), kTcr1), 1e-13);
  EXPECT_LE(rel(r.t_cr2->value(), kTcr2), 1e-13);
  EXPECT_LE(rel(*r.t_cr2 / Years(1.5e10), kTcr2OverT0), 1e-13);
}

TEST(CriticalTimes, FiducialApproximations) {
  const auto p = fiducial_params();
  const auto r = solve_critical_times(p);
  EXPECT_LE(rel(approx_t_cr1(p).value(), 405.0), 1e-14);
  EXPECT_LE(rel(approx_t_cr2(p) / p.t_0(), kApproxTcr2OverT0), 1e-14);
  ASSERT_TRUE(r.rel_err_1 && r.rel_err_2);
  EXPECT_LE(rel(*r.rel_err_1, kRelErr1), 1e-6);
  EXPECT_LE(rel(*r.rel_err_2, kRelErr2), 1e-6);
  EXPECT_LE(*r.rel_err_2, 1e-6);
  EXPECT_LE(r.t_cr2->value(), 1e4 * p.t_0().value());
}

TEST(CriticalTimes, FiducialValidityFlags) {
  const auto r = solve_critical_times(fiducial_params());
  EXPECT_FALSE(r.valid_1.after_decoupling);
  EXPECT_FALSE(r.valid_1.after_t_nr);
  EXPECT_TRUE(r.valid_2.after_decoupling);
  EXPECT_TRUE(r.valid_2.after_t_nr);
  EXPECT_EQ(r.t_dec.value(), kDefaultDecouplingTime.value());

  const auto early_dec = solve_critical_times(fiducial_params(), Years(100.0));
  EXPECT_TRUE(early_dec.valid_1.after_decoupling);
  EXPECT_THROW(solve_critical_times(fiducial_params(), Years(0.0)), ValidationError);
}

TEST(CriticalTimes, AgreesWithTrigonometricFormula) {
  const std::vector<std::pair<double, double>> cases = {
      {30.0, 2.0}, {12.0, 0.5}, {100.0, 50.0}, {7.5, 1e-3}, {1000.0, 3000.0}};
  for (const auto& [alpha, beta] : cases) {
    const auto d = DimensionlessParams::make(alpha, beta);
    ASSERT_TRUE(pair_exists(d)) << alpha << " " << beta;
    const auto r = solve_critical_times(from_groups(alpha, beta));
    const auto t = trig_roots(alpha, beta);
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(r.u_roots[k].u, t[k], 1e-12 * std::max(1.0, std::abs(t[k]))) << alpha << " " << beta;
    }
  }
}

TEST(CriticalTimes, VietaRelationsOverRandomParameters) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int pairs = 0;
  for (int i = 0; i < 3000; ++i) {
    const double temp_nr = std::pow(10.0, 6.0 + 2.0 * u(rng));
    const double t_nr = std::pow(10.0, 6.0 + 3.0 * u(rng));
    const auto p = make_params(Kelvin(temp_nr), Years(t_nr), Years(1.5e10), Kelvin(3.0));
    const auto d = to_dimensionless(p);
    const auto r = solve_critical_times(p);
    ASSERT_EQ(r.exists_pair, pair_exists(d));
    if (!r.exists_pair) {
      EXPECT_FALSE(r.t_cr1 || r.t_cr2);
      continue;
    }
    ++pairs;
    const double a = r.u_roots[0].u, b = r.u_roots[1].u, c = r.u_roots[2].u;
    const double scale = std::abs(a) + std::abs(b) + std::abs(c);
    EXPECT_LE(std::abs(a + b + c), 1e-12 * scale);
    EXPECT_LE(rel(a * b + b * c + c * a, -d.alpha / 3.0), 1e-10);
    EXPECT_LE(rel(a * b * c, -d.beta / 2.0), 1e-9);
    for (const auto& root : r.u_roots) {
      EXPECT_LE(std::abs(cubic_residual(d, root.u)), 1e-10 * residual_scale(d, root.u));
    }
    EXPECT_LT(*r.t_cr1, *r.t_cr2);
    EXPECT_GT(a, cubic_min_location(d));
    EXPECT_LT(b, cubic_min_location(d));
  }
  EXPECT_GT(pairs, 2000);
}

// Dense scan of the bracket sign: the only sign changes are at the roots.
TEST(CriticalTimes, SignChangesMatchScan) {
  const auto p = fiducial_params();
  const auto r = solve_critical_times(p);
  std::vector<double> crossings;
  const int n = 20000;
  double prev_t = 1.0;
  double prev = bracket_rate(p, Years(prev_t));
  for (int i = 1; i <= n; ++i) {
    const double t = std::pow(10.0, 20.0 * i / n);
    const double v = bracket_rate(p, Years(t));
    if ((v > 0.0) != (prev > 0.0)) crossings.push_back(std::sqrt(t * prev_t));
    prev = v;
    prev_t = t;
  }
  ASSERT_EQ(crossings.size(), 2u);
  EXPECT_LE(rel(crossings[0], r.t_cr1->value()), 3e-3);
  EXPECT_LE(rel(crossings[1], r.t_cr2->value()), 3e-3);
}

TEST(CriticalTimes, NoPairAboveThreshold) {
  const double alpha = 30.0;
  const double threshold = pair_threshold(DimensionlessParams::make(alpha, 1.0));
  const auto r = solve_critical_times(from_groups(alpha, threshold * 1.01));
  EXPECT_FALSE(r.exists_pair);
  EXPECT_FALSE(r.t_cr1.has_value());
  EXPECT_TRUE(r.u_roots.empty());
  EXPECT_FALSE(r.rel_err_1.has_value());
  // Bracket never turns positive.
  const auto p = from_groups(alpha, threshold * 1.01);
  for (int i = 0; i <= 200; ++i) EXPECT_LT(bracket_rate(p, Years(std::pow(10.0, 6.0 + 0.05 * i))), 0.0);
}

TEST(CriticalTimes, NearTangencyRootsMerge) {
  const double alpha = 30.0;
  const double threshold = pair_threshold(DimensionlessParams::make(alpha, 1.0));
  const auto r = solve_critical_times(from_groups(alpha, threshold * (1.0 - 1e-8)));
  ASSERT_TRUE(r.exists_pair);
  const double u_star = std::sqrt(alpha) / 3.0;
  EXPECT_LE(rel(r.u_roots[0].u, u_star), 1e-3);
  EXPECT_LE(rel(r.u_roots[1].u, u_star), 1e-3);
  EXPECT_GT(r.u_roots[0].u, r.u_roots[1].u);
}

TEST(CriticalTimes, ApproximationErrorShrinksAsAlphaGrows) {
  double prev1 = INFINITY, prev2 = INFINITY;
  for (const double temp_nr : {1e6, 1e7, 1e8}) {
    const auto r = solve_critical_times(make_params(Kelvin(temp_nr), Years(1e6), Years(1.5e10), Kelvin(3)));
    ASSERT_TRUE(r.exists_pair);
    EXPECT_LT(*r.rel_err_1, prev1);
    EXPECT_LT(*r.rel_err_2, prev2);
    prev1 = *r.rel_err_1;
    prev2 = *r.rel_err_2;
  }
}

TEST(CubicSolver, RequiresSignChange) {
  const auto d = DimensionlessParams::make(30.0, 2.0);
  EXPECT_THROW(solve_cubic_in_bracket(d, 10.0, 20.0), NumericalFailure);
  EXPECT_NO_THROW(solve_cubic_in_bracket(d, 0.0, cubic_min_location(d)));
}

TEST(TimeConversion, RoundTrip) {
  const auto d = to_dimensionless(fiducial_params());
  for (const double t : {1.0, 405.0, 1.5e10, 4.8e13}) {
    EXPECT_LE(rel(u_to_time(d, time_to_u(d, Years(t))).value(), t), 4e-16 * 4);
  }
}

TEST(TimeRelativeError, SymmetricAndSmall) {
  EXPECT_DOUBLE_EQ(time_relative_error(Years(2.0), Years(1.0)), 1.0);
  EXPECT_DOUBLE_EQ(time_relative_error(Years(1.0), Years(1.0)), 0.0);
  const double x = 1.0 + 1e-12;
  EXPECT_NEAR(time_relative_error(Years(x), Years(1.0)), x - 1.0, 1e-24);
}
