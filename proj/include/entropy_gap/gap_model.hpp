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

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entropy_gap/errors.hpp"
#include "entropy_gap/quantities.hpp"

namespace egap {

/// Entropy gap in log form: the value is sign * C1 * exp(ln_magnitude) with
/// the unknown positive amplitude C1 factored out. The raw magnitude is far
/// outside double range (ln ~ 3e5 at t_0 for fiducial parameters), so only
/// differences of ln_magnitude are ever exponentiated.
struct LogGapValue {
  int sign = -1;
  double ln_magnitude = 0.0;
};

/// Which exponent the Boltzmann factor carries.
///
/// `composed` substitutes T(t) = T_0 (t_0/t)^(2/3) into exp(omega_1/T),
/// giving alpha * (t/t_0)^(2/3); this is the form consistent with the
/// derivative and the critical-time equation. `as_printed` keeps the inverted
/// ratio alpha * (t_0/t)^(2/3) that appears in the original closed form. It
/// exists for comparison and fault injection only.
enum class ExponentForm { composed, as_printed };

namespace detail {

inline void require_positive_time(Years t, const char* what) {
  if (!std::isfinite(t.value()) || !(t.value() > 0.0)) {
    throw DomainError(std::string(what) + ": time must be finite and positive, got " +
                      std::to_string(t.value()));
  }
}

}  // namespace detail

/// Radiation temperature under matter-dominated expansion, T_0 (t_0/t)^(2/3).
inline Kelvin temperature_at(const ModelParams& p, Years t) {
  detail::require_positive_time(t, "temperature_at");
  return p.temp_0() * std::pow(p.t_0() / t, 2.0 / 3.0);
}

/// ln|dS/C1| = -beta (t/t_0) - 2 ln(t / 1 yr) + alpha (t/t_0)^(2/3); sign -1.
inline LogGapValue ln_gap(const ModelParams& p, Years t,
                          ExponentForm form = ExponentForm::composed) {
  detail::require_positive_time(t, "ln_gap");
  const auto d = to_dimensionless(p);
  const double x = t / p.t_0();
  const double boltzmann =
      form == ExponentForm::composed ? std::cbrt(x * x) : std::cbrt(1.0 / (x * x));
  return LogGapValue{-1, -d.beta * x - 2.0 * std::log(t.value()) + d.alpha * boltzmann};
}

/// ln|dS(t)| - ln|dS(t_ref)|, evaluated term by term so that nearby times do
/// not lose digits to the ~1e5-sized absolute logs.
inline double ln_gap_difference(const ModelParams& p, Years t, Years t_ref,
                                ExponentForm form = ExponentForm::composed) {
  detail::require_positive_time(t, "ln_gap_difference");
  detail::require_positive_time(t_ref, "ln_gap_difference");
  const auto d = to_dimensionless(p);
  const double ln_ratio = std::log(t / t_ref);
  const double x_ref = t_ref / p.t_0();
  const double decay = -d.beta * ((t - t_ref) / p.t_0());
  const double dilution = -2.0 * ln_ratio;
  double boltzmann = 0.0;
  if (form == ExponentForm::composed) {
    boltzmann = d.alpha * std::cbrt(x_ref * x_ref) * std::expm1((2.0 / 3.0) * ln_ratio);
  } else {
    boltzmann = d.alpha * std::cbrt(1.0 / (x_ref * x_ref)) * std::expm1(-(2.0 / 3.0) * ln_ratio);
  }
  return decay + dilution + boltzmann;
}

/// Logarithmic growth rate of the gap, d ln|dS| / dt, per year:
/// -gamma - 2/t + (2/3) (omega_1 / (t_0 T_0)) (t_0/t)^(1/3).
inline double bracket_rate(const ModelParams& p, Years t) {
  detail::require_positive_time(t, "bracket_rate");
  const auto d = to_dimensionless(p);
  const double t0 = p.t_0().value();
  return -p.gamma() - 2.0 / t.value() + (2.0 / 3.0) * (d.alpha / t0) * std::cbrt(t0 / t.value());
}

/// Black-body entropy (16/3) sigma V T^3, in units of sigma K^3 V when
/// sigma = 1.
inline double equilibrium_entropy(Kelvin temp, double volume, double sigma = 1.0) {
  if (!std::isfinite(temp.value()) || !(temp.value() > 0.0)) {
    throw DomainError("equilibrium_entropy: temperature must be positive");
  }
  if (!std::isfinite(volume) || !(volume > 0.0)) {
    throw DomainError("equilibrium_entropy: volume must be positive");
  }
  if (!std::isfinite(sigma) || !(sigma > 0.0)) {
    throw DomainError("equilibrium_entropy: sigma must be positive");
  }
  const double T = temp.value();
  return (16.0 / 3.0) * sigma * volume * T * T * T;
}

/// Position of a time relative to the two critical times.
enum class Phase { before_tcr1, at_tcr1, between, at_tcr2, after_tcr2, no_pair };

inline const char* to_string(Phase ph) {
  switch (ph) {
    case Phase::before_tcr1: return "before_tcr1";
    case Phase::at_tcr1: return "at_tcr1";
    case Phase::between: return "between";
    case Phase::at_tcr2: return "at_tcr2";
    case Phase::after_tcr2: return "after_tcr2";
    case Phase::no_pair: return "no_pair";
  }
  return "unknown";
}

/// Times within `rel_tol` (relative) of a critical time are labelled as the
/// boundary itself.
inline Phase classify_phase(Years t, std::optional<Years> t_cr1, std::optional<Years> t_cr2,
                            double rel_tol = 1e-9) {
  if (!t_cr1 || !t_cr2) return Phase::no_pair;
  const auto near = [&](Years root) {
    return std::abs(t.value() - root.value()) <= rel_tol * root.value();
  };
  if (near(*t_cr1)) return Phase::at_tcr1;
  if (near(*t_cr2)) return Phase::at_tcr2;
  if (t < *t_cr1) return Phase::before_tcr1;
  if (t < *t_cr2) return Phase::between;
  return Phase::after_tcr2;
}

struct GapCurvePoint {
  Years t;
  double ln_gap_rel;      // ln|dS(t)| - ln|dS(t_ref)|
  double bracket;         // per year
  Phase phase;
};

/// One sample of the schematic total-entropy picture: S_max normalised to 1
/// and S_act = S_max + dS_rel.
struct EntropyCurvePoint {
  Years t;
  double s_max;
  double s_act;
};

namespace detail {

inline void require_increasing_grid(std::span<const Years> t_grid) {
  if (t_grid.empty()) throw ValidationError("time grid is empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    require_positive_time(t_grid[i], "time grid");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) {
      throw ValidationError("time grid must be strictly increasing (index " + std::to_string(i) +
                            ")");
    }
  }
}

}  // namespace detail

/// S_act(t) = 1 - epsilon_plot * exp(ln_gap(t) - ln_gap(t_deepest)), so the
/// gap has magnitude epsilon_plot at `t_deepest` (normally t_cr2).
inline std::vector<EntropyCurvePoint> actual_entropy_curve(const ModelParams& p,
                                                           double epsilon_plot,
                                                           std::span<const Years> t_grid,
                                                           Years t_deepest) {
  if (!std::isfinite(epsilon_plot) || !(epsilon_plot > 0.0)) {
    throw ValidationError("epsilon_plot must be positive");
  }
  detail::require_increasing_grid(t_grid);
  std::vector<EntropyCurvePoint> out;
  out.reserve(t_grid.size());
  for (const Years t : t_grid) {
    const double rel = ln_gap_difference(p, t, t_deepest);
    if (rel > 700.0) {
      throw NumericalFailure("relative gap exp(" + std::to_string(rel) + ") at t = " +
                             std::to_string(t.value()) + " yr overflows");
    }
    out.push_back({t, 1.0, 1.0 - epsilon_plot * std::exp(rel)});
  }
  return out;
}

}  // namespace egap
