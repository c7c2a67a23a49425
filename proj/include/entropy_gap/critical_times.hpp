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

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entropy_gap/errors.hpp"
#include "entropy_gap/gap_model.hpp"
#include "entropy_gap/quantities.hpp"

namespace egap {

/// Default matter-radiation decoupling time. The model is only meaningful
/// after it; the value is a standard cosmological figure, not a model input.
inline constexpr Years kDefaultDecouplingTime{3.8e5};

/// Bisection cap for the root finder. 2^-200 of any finite bracket is far
/// below double resolution, so hitting the cap means malformed input.
inline constexpr int kMaxRootIterations = 200;

// With u = (t_0/t)^(1/3) the balance condition
//   beta + 2 t_0/t = (2/3) alpha (t_0/t)^(1/3)
// becomes the cubic f(u) = 2u^3 - (2/3) alpha u + beta = 0, and
// bracket_rate(t) * t_0 = -f(u).

inline double cubic_residual(const DimensionlessParams& d, double u) {
  return 2.0 * u * u * u - (2.0 / 3.0) * d.alpha * u + d.beta;
}

inline double cubic_slope(const DimensionlessParams& d, double u) {
  return 6.0 * u * u - (2.0 / 3.0) * d.alpha;
}

/// Positive local minimum of f, sqrt(alpha)/3.
inline double cubic_min_location(const DimensionlessParams& d) { return std::sqrt(d.alpha) / 3.0; }

/// beta below which f has two positive roots: (4/27) alpha^(3/2).
inline double pair_threshold(const DimensionlessParams& d) {
  return (4.0 / 27.0) * d.alpha * std::sqrt(d.alpha);
}

/// True iff the critical-time equation has two distinct positive roots.
/// Tangency (beta exactly at the threshold) counts as no pair.
inline bool pair_exists(const DimensionlessParams& d) { return d.beta < pair_threshold(d); }

inline Years u_to_time(const DimensionlessParams& d, double u) {
  return d.t_0 / (u * u * u);
}

inline double time_to_u(const DimensionlessParams& d, Years t) { return std::cbrt(d.t_0 / t); }

/// Convergence scale for |f(u)|: the size of the largest term at u.
inline double residual_scale(const DimensionlessParams& d, double u) {
  return std::max(d.beta, (2.0 / 3.0) * d.alpha * std::abs(u));
}

/// Safeguarded Newton iteration on f inside [lo, hi], which must bracket a
/// sign change. Newton steps that leave the bracket fall back to bisection.
inline double solve_cubic_in_bracket(const DimensionlessParams& d, double lo, double hi) {
  double f_lo = cubic_residual(d, lo);
  const double f_hi = cubic_residual(d, hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw NumericalFailure("no sign change on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
  }
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < kMaxRootIterations; ++iter) {
    const double fx = cubic_residual(d, x);
    if (fx == 0.0) return x;
    if ((fx > 0.0) == (f_lo > 0.0)) {
      lo = x;
      f_lo = fx;
    } else {
      hi = x;
    }
    const bool converged = std::abs(fx) <= 1e-12 * residual_scale(d, x);
    const double slope = cubic_slope(d, x);
    double next = slope != 0.0 ? x - fx / slope : std::numeric_limits<double>::quiet_NaN();
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (converged && std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
      return std::abs(cubic_residual(d, next)) < std::abs(fx) ? next : x;
    }
    if (next == x || std::nextafter(lo, hi) >= hi) {
      if (converged) return x;
      break;
    }
    x = next;
  }
  const double fx = cubic_residual(d, x);
  if (std::abs(fx) <= 1e-12 * residual_scale(d, x)) return x;
  throw NumericalFailure("critical-time root did not converge; last bracket [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

enum class RootKind { physical_early, physical_late, unphysical_negative };

inline const char* to_string(RootKind k) {
  switch (k) {
    case RootKind::physical_early: return "physical_early";
    case RootKind::physical_late: return "physical_late";
    case RootKind::unphysical_negative: return "unphysical_negative";
  }
  return "unknown";
}

struct URoot {
  double u;
  RootKind kind;
};

struct RootValidity {
  bool after_decoupling = false;
  bool after_t_nr = false;
};

struct CriticalTimesReport {
  bool exists_pair = false;
  std::optional<Years> t_cr1;
  std::optional<Years> t_cr2;
  /// Real roots of f in u: early (largest u), late, then the negative one.
  std::vector<URoot> u_roots;
  Years approx_t_cr1;
  Years approx_t_cr2;
  std::optional<double> rel_err_1;
  std::optional<double> rel_err_2;
  RootValidity valid_1;
  RootValidity valid_2;
  Years t_dec;
};

/// Early root with the balance term beta dropped: t_0 (3 T_0 / omega_1)^(3/2).
inline Years approx_t_cr1(const ModelParams& p) {
  return p.t_0() * std::pow(3.0 * (p.temp_0() / p.temp_nr()), 1.5);
}

/// Late root with the 2 t_0/t term dropped:
/// t_0 ((2/3) (omega_1/T_0) (t_nr/t_0))^3.
inline Years approx_t_cr2(const ModelParams& p) {
  const double base = (2.0 / 3.0) * (p.temp_nr() / p.temp_0()) * (p.t_nr() / p.t_0());
  return p.t_0() * (base * base * base);
}

/// |approx - exact| / exact for times t = t_0 / u^3, computed from the u
/// ratio so that tiny errors are not swamped by rounding in t.
inline double time_relative_error(Years approx, Years exact) {
  return std::abs(std::expm1(std::log(approx / exact)));
}

inline CriticalTimesReport solve_critical_times(const ModelParams& p,
                                                Years t_dec = kDefaultDecouplingTime) {
  if (!std::isfinite(t_dec.value()) || !(t_dec.value() > 0.0)) {
    throw ValidationError("decoupling time must be finite and positive");
  }
  const auto d = to_dimensionless(p);
  CriticalTimesReport r;
  r.t_dec = t_dec;
  r.approx_t_cr1 = approx_t_cr1(p);
  r.approx_t_cr2 = approx_t_cr2(p);
  r.exists_pair = pair_exists(d);
  if (!r.exists_pair) return r;

  const double u_star = cubic_min_location(d);
  const double u_hi = std::sqrt(d.alpha / 3.0) + d.beta;
  const double u_early = solve_cubic_in_bracket(d, u_star, u_hi);
  const double u_late = solve_cubic_in_bracket(d, 0.0, u_star);

  // Negative root: f(-u_star) > 0; walk left until f < 0.
  double lower = -2.0 * u_hi;
  for (int i = 0; i < 64 && cubic_residual(d, lower) >= 0.0; ++i) lower *= 2.0;
  const double u_negative = solve_cubic_in_bracket(d, lower, -u_star);

  r.u_roots = {{u_early, RootKind::physical_early},
               {u_late, RootKind::physical_late},
               {u_negative, RootKind::unphysical_negative}};
  r.t_cr1 = u_to_time(d, u_early);
  r.t_cr2 = u_to_time(d, u_late);
  r.rel_err_1 = time_relative_error(r.approx_t_cr1, *r.t_cr1);
  r.rel_err_2 = time_relative_error(r.approx_t_cr2, *r.t_cr2);
  r.valid_1 = {*r.t_cr1 > t_dec, *r.t_cr1 > p.t_nr()};
  r.valid_2 = {*r.t_cr2 > t_dec, *r.t_cr2 > p.t_nr()};
  return r;
}

/// Entropy curve normalised at the late critical time (deepest gap).
inline std::vector<EntropyCurvePoint> actual_entropy_curve(const ModelParams& p,
                                                           double epsilon_plot,
                                                           std::span<const Years> t_grid) {
  const auto report = solve_critical_times(p);
  if (!report.exists_pair) {
    throw ValidationError("no critical pair: the gap has no deepest point to normalise at");
  }
  return actual_entropy_curve(p, epsilon_plot, t_grid, *report.t_cr2);
}

}  // namespace egap
