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
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entropy_gap/errors.hpp"
#include "entropy_gap/quantities.hpp"

// Finite-dimensional check of the entropy-gap expansion. All states are
// diagonal in the energy basis, so the conditional entropy reduces to a
// classical relative entropy between probability vectors.

namespace egap::spectral {

inline constexpr double kZeta3 = 1.2020569031595942854;

/// Energies (in Kelvin, k_B = 1) with a quadrature weight per point.
///
/// Probabilities on the grid are masses: a continuum density rho(omega) is
/// stored as rho(omega_i) * weight_i. With unit weights the grid is a plain
/// list of levels; with photon-measure weights (omega^2 d omega) discrete
/// sums converge to the continuum integrals as the grid is refined.
class EnergyGrid {
 public:
  static EnergyGrid with_unit_weights(std::vector<double> omegas) {
    std::vector<double> weights(omegas.size(), 1.0);
    return EnergyGrid(std::move(omegas), std::move(weights));
  }

  /// `count` geometrically spaced points on [lo, hi] with trapezoid weights
  /// for the measure omega^2 d omega.
  static EnergyGrid photon_geometric(Kelvin lo, Kelvin hi, std::size_t count) {
    if (count < 2) throw ValidationError("energy grid needs at least 2 points");
    if (!(lo.value() > 0.0) || !(hi > lo) || !std::isfinite(hi.value())) {
      throw ValidationError("energy grid needs 0 < lo < hi");
    }
    std::vector<double> omegas(count);
    const double ln_lo = std::log(lo.value());
    const double step = (std::log(hi.value()) - ln_lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
      omegas[i] = std::exp(ln_lo + step * static_cast<double>(i));
    }
    omegas.front() = lo.value();
    omegas.back() = hi.value();
    std::vector<double> weights(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double left = i > 0 ? omegas[i - 1] : omegas[i];
      const double right = i + 1 < count ? omegas[i + 1] : omegas[i];
      weights[i] = omegas[i] * omegas[i] * 0.5 * (right - left);
    }
    return EnergyGrid(std::move(omegas), std::move(weights));
  }

  [[nodiscard]] std::span<const double> omegas() const { return omegas_; }
  [[nodiscard]] std::span<const double> weights() const { return weights_; }
  [[nodiscard]] std::size_t size() const { return omegas_.size(); }

  bool operator==(const EnergyGrid&) const = default;

 private:
  EnergyGrid(std::vector<double> omegas, std::vector<double> weights)
      : omegas_(std::move(omegas)), weights_(std::move(weights)) {
    if (omegas_.empty()) throw ValidationError("energy grid is empty");
    for (std::size_t i = 0; i < omegas_.size(); ++i) {
      if (!std::isfinite(omegas_[i]) || !(omegas_[i] > 0.0)) {
        throw ValidationError("energy grid point " + std::to_string(i) + " must be positive");
      }
      if (i > 0 && !(omegas_[i] > omegas_[i - 1])) {
        throw ValidationError("energy grid must be strictly increasing (index " +
                              std::to_string(i) + ")");
      }
      if (!std::isfinite(weights_[i]) || !(weights_[i] > 0.0)) {
        throw ValidationError("energy grid weight " + std::to_string(i) + " must be positive");
      }
    }
  }

  std::vector<double> omegas_;
  std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const EnergyGrid>;

namespace detail {

/// Neumaier-compensated sum.
inline double accurate_sum(std::span<const double> xs) {
  double sum = 0.0;
  double c = 0.0;
  for (const double x : xs) {
    const double t = sum + x;
    c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + c;
}

inline void require_same_grid(const GridPtr& a, const GridPtr& b) {
  if (a != b && !(a && b && *a == *b)) {
    throw ValidationError("states live on different energy grids");
  }
}

}  // namespace detail

/// Diagonal of a density matrix: non-negative masses summing to 1.
struct SpectralState {
  GridPtr grid;
  std::vector<double> probs;

  static SpectralState make(GridPtr grid, std::vector<double> probs) {
    if (!grid) throw ValidationError("state has no grid");
    if (probs.size() != grid->size()) throw ValidationError("state size does not match grid");
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (!std::isfinite(probs[i]) || probs[i] < 0.0) {
        throw ValidationError("state entry " + std::to_string(i) + " is negative or not finite");
      }
    }
    if (std::abs(detail::accurate_sum(probs) - 1.0) > 1e-12) {
      throw ValidationError("state does not sum to 1");
    }
    return SpectralState{std::move(grid), std::move(probs)};
  }
};

/// Trace-free correction around an equilibrium state.
struct Perturbation {
  GridPtr grid;
  std::vector<double> devs;
  double peak_omega = 0.0;
  double width = 0.0;
};

/// Bose-Einstein occupancy 1/(e^x - 1) written to stay finite for large x.
inline double bose_occupancy(double x) {
  if (x > 700.0) {
    const double e = std::exp(-x);
    return e / (1.0 - e);
  }
  return 1.0 / std::expm1(x);
}

/// Equilibrium radiation state at temperature `temp`: masses proportional to
/// weight_i / (e^(omega_i/T) - 1), normalised to 1.
inline SpectralState blackbody_state(const GridPtr& grid, Kelvin temp) {
  if (!grid) throw ValidationError("blackbody_state: no grid");
  if (!std::isfinite(temp.value()) || !(temp.value() > 0.0)) {
    throw DomainError("blackbody_state: temperature must be positive");
  }
  const auto omegas = grid->omegas();
  const auto weights = grid->weights();
  std::vector<double> probs(grid->size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] = bose_occupancy(omegas[i] / temp.value()) * weights[i];
  }
  const double total = detail::accurate_sum(probs);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DegenerateState("black-body weights underflow at T = " + std::to_string(temp.value()));
  }
  for (double& p : probs) p /= total;
  return SpectralState{grid, std::move(probs)};
}

/// Gaussian bump centred on `peak_omega`, made trace-free by removing its
/// total mass along the base state: devs_i = g_i - (sum g) base_i, with g_i
/// the bump sampled on the grid (times the grid weight). Unscaled.
inline Perturbation peaked_perturbation(const GridPtr& grid, Kelvin peak_omega, Kelvin width,
                                        const SpectralState& base) {
  if (!grid) throw ValidationError("peaked_perturbation: no grid");
  detail::require_same_grid(grid, base.grid);
  const auto omegas = grid->omegas();
  const auto weights = grid->weights();
  const double peak = peak_omega.value();
  const double w = width.value();
  if (!std::isfinite(w) || !(w > 0.0)) throw ValidationError("perturbation width must be positive");
  if (!(peak >= omegas.front() && peak <= omegas.back())) {
    throw ValidationError("perturbation peak lies outside the energy grid");
  }
  std::vector<double> g(grid->size());
  double largest = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double z = (omegas[i] - peak) / w;
    const double bump = std::exp(-0.5 * z * z);
    largest = std::max(largest, bump);
    g[i] = bump * weights[i];
  }
  if (!(largest > 1e-30)) {
    throw EmptyPeak("no grid point within reach of the peak at width " + std::to_string(w));
  }
  const double mass = detail::accurate_sum(g);
  std::vector<double> devs(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) devs[i] = g[i] - mass * base.probs[i];
  // Base normalisation is only good to rounding; push the leftover back along
  // the base so the trace vanishes to the same precision.
  const double leftover = detail::accurate_sum(devs);
  for (std::size_t i = 0; i < devs.size(); ++i) devs[i] -= leftover * base.probs[i];
  return Perturbation{grid, std::move(devs), peak, w};
}

/// Rescales `pert` so that max_i |devs_i / base_i| = 1. The amplitude of the
/// scaled perturbation is then the largest fractional departure from
/// equilibrium, and any amplitude in [0, 1] keeps the state non-negative.
inline Perturbation with_unit_contrast(Perturbation pert, const SpectralState& base) {
  detail::require_same_grid(pert.grid, base.grid);
  double contrast = 0.0;
  for (std::size_t i = 0; i < pert.devs.size(); ++i) {
    if (base.probs[i] > 0.0) contrast = std::max(contrast, std::abs(pert.devs[i] / base.probs[i]));
  }
  if (!(contrast > 0.0) || !std::isfinite(contrast)) {
    throw NumericalFailure("perturbation contrast is zero or not finite");
  }
  for (double& d : pert.devs) d /= contrast;
  return pert;
}

namespace detail {

inline double decay_factor(double gamma, Years t) {
  if (!std::isfinite(gamma) || gamma < 0.0) throw ValidationError("gamma must be non-negative");
  if (std::isnan(t.value()) || t.value() < 0.0) throw DomainError("time must be non-negative");
  return std::exp(-gamma * t.value());
}

/// Throws NonPhysicalState if base + eps * devs has a negative entry.
inline void require_admissible(const SpectralState& base, const Perturbation& pert, double amplitude,
                               double decay) {
  require_same_grid(base.grid, pert.grid);
  if (!std::isfinite(amplitude) || amplitude < 0.0) {
    throw ValidationError("amplitude must be finite and non-negative");
  }
  const double eps = amplitude * decay;
  std::optional<std::size_t> worst;
  double worst_value = 0.0;
  double max_amplitude = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < base.probs.size(); ++i) {
    const double d = pert.devs[i];
    if (d < 0.0) max_amplitude = std::min(max_amplitude, base.probs[i] / (-d) / decay);
    const double v = base.probs[i] + eps * d;
    if (v < worst_value) {
      worst_value = v;
      worst = i;
    }
  }
  if (worst) {
    throw NonPhysicalState("entry " + std::to_string(*worst) + " becomes " +
                               std::to_string(worst_value) + "; admissible amplitude is at most " +
                               std::to_string(max_amplitude),
                           *worst, max_amplitude);
  }
}

}  // namespace detail

/// rho(t) = rho_* + amplitude e^(-gamma t) rho_1.
inline SpectralState state_at(const SpectralState& base, const Perturbation& pert,
                              double amplitude, double gamma, Years t) {
  const double decay = detail::decay_factor(gamma, t);
  detail::require_admissible(base, pert, amplitude, decay);
  const double eps = amplitude * decay;
  std::vector<double> probs(base.probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = base.probs[i] + eps * pert.devs[i];
  return SpectralState{base.grid, std::move(probs)};
}

/// (1 + x) ln(1 + x) - x, which is >= 0 for x >= -1.
inline double relative_entropy_kernel(double x) {
  if (std::abs(x) < 1e-3) {
    // sum_{n>=2} (-1)^n x^n / (n (n - 1))
    double term = x * x;
    double sum = 0.0;
    for (int n = 2; n <= 9; ++n) {
      sum += term / static_cast<double>(n * (n - 1)) * ((n % 2 == 0) ? 1.0 : -1.0);
      term *= x;
    }
    return sum;
  }
  if (x == -1.0) return 1.0;
  return (1.0 + x) * std::log1p(x) - x;
}

/// Conditional entropy -sum_i s_i ln(s_i / r_i) of `state` with respect to
/// `reference`, with 0 ln 0 = 0. Always <= 0.
///
/// Evaluated as -sum_i r_i k((s_i - r_i) / r_i) with k the kernel above; the
/// two forms differ by sum_i (s_i - r_i), which vanishes for normalised
/// states, and this one has no cancellation between large terms when the
/// states are close. Throws SupportViolation when s_i > 0 where r_i = 0.
inline double conditional_entropy(const SpectralState& state, const SpectralState& reference) {
  detail::require_same_grid(state.grid, reference.grid);
  std::vector<double> terms(state.probs.size(), 0.0);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double s = state.probs[i];
    const double r = reference.probs[i];
    if (r == 0.0) {
      if (s > 0.0) {
        throw SupportViolation("state has weight at index " + std::to_string(i) +
                                   " where the reference has none",
                               i);
      }
      continue;
    }
    terms[i] = r * relative_entropy_kernel((s - r) / r);
  }
  return -detail::accurate_sum(terms);
}

/// Which small-perturbation form to report.
///
/// `derivation_consistent` is the second-order expansion of the conditional
/// entropy for a trace-free correction: -(1/2) eps^2 sum devs^2/base with
/// eps = amplitude e^(-gamma t). `paper_literal` is the form with a single
/// decay factor and no 1/2: -e^(-gamma t) sum (amplitude devs)^2/base.
enum class GapConvention { derivation_consistent, paper_literal };

namespace detail {

inline double inverse_weighted_square_sum(const SpectralState& base, const Perturbation& pert) {
  std::vector<double> terms(base.probs.size(), 0.0);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double d = pert.devs[i];
    if (d == 0.0) continue;
    if (base.probs[i] == 0.0) {
      throw SupportViolation("perturbation is nonzero where the base state vanishes", i);
    }
    terms[i] = d * d / base.probs[i];
  }
  return accurate_sum(terms);
}

inline double convention_prefactor(GapConvention convention, double amplitude, double decay) {
  return convention == GapConvention::derivation_consistent
             ? 0.5 * (amplitude * decay) * (amplitude * decay)
             : decay * amplitude * amplitude;
}

}  // namespace detail

inline double quadratic_gap(const SpectralState& base, const Perturbation& pert, double amplitude,
                            double gamma, Years t,
                            GapConvention convention = GapConvention::derivation_consistent) {
  const double decay = detail::decay_factor(gamma, t);
  detail::require_admissible(base, pert, amplitude, decay);
  if (amplitude == 0.0) return 0.0;
  return -detail::convention_prefactor(convention, amplitude, decay) *
         detail::inverse_weighted_square_sum(base, pert);
}

/// tr(rho_1^2) over the peak, sum devs_i^2 / weight_i for
/// |omega_i - peak| <= 5 width. The background part of a trace-free
/// correction is excluded: in the Boltzmann-weighted trace it is suppressed by
/// e^(-omega/T) relative to the peak.
inline double peak_strength(const Perturbation& pert) {
  const auto omegas = pert.grid->omegas();
  const auto weights = pert.grid->weights();
  std::vector<double> terms(pert.devs.size(), 0.0);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (std::abs(omegas[i] - pert.peak_omega) <= 5.0 * pert.width) {
      terms[i] = pert.devs[i] * pert.devs[i] / weights[i];
    }
  }
  return detail::accurate_sum(terms);
}

/// Peaked Boltzmann-limit gap: -(1/2) eps^2 (2 zeta(3) T^3) e^(omega_1/T) K,
/// where 2 zeta(3) T^3 is the continuum black-body normalisation for the
/// photon measure and K the peak strength. Only meaningful on photon-measure
/// grids. Requires omega_1 / T > 10.
inline double wien_gap(Kelvin base_temp, const Perturbation& pert, double amplitude, double gamma,
                       Years t, double strength,
                       GapConvention convention = GapConvention::derivation_consistent) {
  if (!std::isfinite(base_temp.value()) || !(base_temp.value() > 0.0)) {
    throw DomainError("wien_gap: temperature must be positive");
  }
  const double ratio = pert.peak_omega / base_temp.value();
  if (!(ratio > 10.0)) {
    throw WienRegimeError("wien_gap needs omega_1/T > 10, got " + std::to_string(ratio));
  }
  if (!std::isfinite(amplitude) || amplitude < 0.0) {
    throw ValidationError("amplitude must be finite and non-negative");
  }
  const double decay = detail::decay_factor(gamma, t);
  const double pre = detail::convention_prefactor(convention, amplitude, decay);
  if (pre == 0.0 || strength == 0.0) return 0.0;
  const double T = base_temp.value();
  const double ln_mag =
      std::log(pre) + std::log(2.0 * kZeta3 * strength) + 3.0 * std::log(T) + ratio;
  if (ln_mag > 709.0) throw NumericalFailure("wien_gap overflows double range");
  return -std::exp(ln_mag);
}

inline double wien_gap(Kelvin base_temp, const Perturbation& pert, double amplitude, double gamma,
                       Years t, GapConvention convention = GapConvention::derivation_consistent) {
  return wien_gap(base_temp, pert, amplitude, gamma, t, peak_strength(pert), convention);
}

/// Strength that makes wien_gap reproduce `quadratic_value` at the given
/// temperature and eps (derivation-consistent convention).
inline double calibrate_wien_strength(double quadratic_value, Kelvin base_temp, Kelvin peak_omega,
                                      double eps) {
  const double T = base_temp.value();
  return -quadratic_value /
         (0.5 * eps * eps * 2.0 * kZeta3 * T * T * T * std::exp(peak_omega.value() / T));
}

// ---------------------------------------------------------------------------
// Oracle configuration and report

/// Standard oracle setup. Energies scale with `temp`; the bump sits at
/// peak_ratio * temp with width width_fraction * peak.
struct OracleConfig {
  double temp = 1.0;
  double peak_ratio = 20.0;
  double width_fraction = 1.0 / 20.0;
  std::size_t grid_points = 2048;
  double grid_lo_over_temp = 1.0 / 100.0;
  double grid_hi_over_peak = 50.0;
  bool unit_contrast = true;
  GapConvention convention = GapConvention::derivation_consistent;
};

struct OracleSetup {
  GridPtr grid;
  SpectralState base;
  Perturbation pert;
  Kelvin temp;
};

inline OracleSetup make_oracle_setup(const OracleConfig& c) {
  const Kelvin temp(c.temp);
  const Kelvin peak(c.peak_ratio * c.temp);
  auto grid = std::make_shared<const EnergyGrid>(EnergyGrid::photon_geometric(
      temp * c.grid_lo_over_temp, peak * c.grid_hi_over_peak, c.grid_points));
  auto base = blackbody_state(grid, temp);
  auto pert = peaked_perturbation(grid, peak, peak * c.width_fraction, base);
  if (c.unit_contrast) pert = with_unit_contrast(std::move(pert), base);
  return OracleSetup{grid, std::move(base), std::move(pert), temp};
}

struct OracleRow {
  Years t;
  double epsilon;
  double delta_s_exact;
  double delta_s_quadratic;
  double delta_s_wien;
  double ln_abs_exact;
  double ln_abs_quadratic;
  double rel_dev_quadratic;
  double rel_dev_wien;
};

struct OracleReport {
  std::vector<OracleRow> rows;
  /// Least-squares slope of ln|dS_exact| against ln eps.
  double epsilon_exponent = 0.0;
  /// -(d ln|dS_exact| / dt) / gamma over the time grid, when measurable.
  std::optional<double> decay_rate_over_gamma;
};

/// Ordinary least-squares slope.
inline double fit_slope(std::span<const double> xs, std::span<const double> ys) {
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

/// Scaling exponent of |dS_exact| in eps over [eps_lo, eps_hi], log-spaced.
inline double measure_epsilon_exponent(const OracleSetup& s, double eps_lo = 1e-4,
                                       double eps_hi = 1e-1, std::size_t points = 13) {
  if (!(eps_lo > 0.0) || !(eps_hi > eps_lo) || points < 2) {
    throw ValidationError("epsilon sweep needs 0 < lo < hi and at least 2 points");
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(points - 1);
    const double eps = std::exp(std::log(eps_lo) + f * (std::log(eps_hi) - std::log(eps_lo)));
    const double exact =
        conditional_entropy(state_at(s.base, s.pert, eps, 0.0, Years(0.0)), s.base);
    if (!(exact < 0.0)) continue;
    xs.push_back(std::log(eps));
    ys.push_back(std::log(-exact));
  }
  if (xs.size() < 2) throw NumericalFailure("epsilon sweep produced no measurable gaps");
  return fit_slope(xs, ys);
}

/// Exact, quadratic and peaked forms of the gap at each time, with
/// eps(t) = amplitude e^(-t / t_nr).
inline OracleReport oracle_report(const ModelParams& p, const OracleConfig& config,
                                  double amplitude, std::span<const Years> t_grid) {
  const auto setup = make_oracle_setup(config);
  const double gamma = p.gamma();
  const double strength = peak_strength(setup.pert);
  OracleReport report;
  report.rows.reserve(t_grid.size());
  std::vector<double> ts, lns;
  for (const Years t : t_grid) {
    const double decay = detail::decay_factor(gamma, t);
    const double exact =
        conditional_entropy(state_at(setup.base, setup.pert, amplitude, gamma, t), setup.base);
    const double quad =
        quadratic_gap(setup.base, setup.pert, amplitude, gamma, t, config.convention);
    const double wien = wien_gap(setup.temp, setup.pert, amplitude, gamma, t, strength,
                                 config.convention);
    const auto ln_abs = [](double v) { return std::log(std::abs(v)); };
    const auto rel_dev = [&](double v) {
      return exact != 0.0 ? (v - exact) / std::abs(exact) : std::numeric_limits<double>::quiet_NaN();
    };
    report.rows.push_back({t, amplitude * decay, exact, quad, wien, ln_abs(exact), ln_abs(quad),
                           rel_dev(quad), rel_dev(wien)});
    if (exact < 0.0) {
      ts.push_back(t.value());
      lns.push_back(std::log(-exact));
    }
  }
  report.epsilon_exponent = measure_epsilon_exponent(setup);
  if (ts.size() >= 2 && ts.front() != ts.back()) {
    report.decay_rate_over_gamma = -fit_slope(ts, lns) / gamma;
  }
  return report;
}

}  // namespace egap::spectral
