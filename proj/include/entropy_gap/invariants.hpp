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
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "entropy_gap/critical_times.hpp"
#include "entropy_gap/gap_model.hpp"
#include "entropy_gap/gaplab.hpp"
#include "entropy_gap/quantities.hpp"
#include "entropy_gap/spectral_oracle.hpp"

namespace egap::check {

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

/// Deliberate defects used to show that the suite can fail.
enum class Fault {
  none,
  misprinted_exponent,  // gap exponent alpha (t_0/t)^(2/3) instead of alpha (t/t_0)^(2/3)
  drop_half,            // quadratic gap without the 1/2
};

/// Model entry points the suite goes through, so a fault can be swapped in.
struct Hooks {
  std::function<double(const ModelParams&, Years, Years)> ln_gap_difference;
  std::function<double(const spectral::SpectralState&, const spectral::Perturbation&, double,
                       double, Years)>
      quadratic_gap;

  static Hooks with(Fault fault) {
    Hooks h;
    const auto form =
        fault == Fault::misprinted_exponent ? ExponentForm::as_printed : ExponentForm::composed;
    h.ln_gap_difference = [form](const ModelParams& p, Years t, Years ref) {
      return egap::ln_gap_difference(p, t, ref, form);
    };
    const double scale = fault == Fault::drop_half ? 2.0 : 1.0;
    h.quadratic_gap = [scale](const spectral::SpectralState& b, const spectral::Perturbation& d,
                              double amp, double gamma, Years t) {
      return scale * spectral::quadratic_gap(b, d, amp, gamma, t);
    };
    return h;
  }
};

namespace detail {

inline std::string fmt(double v) { return lab::format_double(v); }

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

/// Random parameters across the nuclear ranges, with present-day t_0, T_0.
inline ModelParams random_params(std::mt19937_64& rng) {
  return make_params(Kelvin(log_uniform(rng, 1e6, 1e8)), Years(log_uniform(rng, 1e6, 1e9)),
                     Years(1.5e10), Kelvin(3.0));
}

class Suite {
 public:
  explicit Suite(Fault fault, std::uint64_t seed) : hooks_(Hooks::with(fault)), rng_(seed) {}

  std::vector<CheckResult> run() {
    quantities();
    gap_model();
    critical_times();
    spectral();
    return std::move(results_);
  }

 private:
  void record(std::string name, bool ok, std::string detail = "") {
    results_.push_back({std::move(name), ok, std::move(detail)});
  }

  void quantities() {
    bool scale_ok = true;
    bool round_trip_ok = true;
    for (int i = 0; i < 200; ++i) {
      const auto p = random_params(rng_);
      const double k = log_uniform(rng_, 1e-3, 1e3);
      const auto d = to_dimensionless(p);
      const auto ds = to_dimensionless(
          make_params(p.temp_nr() * k, p.t_nr() * k, p.t_0() * k, p.temp_0() * k));
      scale_ok = scale_ok && std::abs(ds.alpha - d.alpha) <= 4e-16 * d.alpha &&
                 std::abs(ds.beta - d.beta) <= 4e-16 * d.beta;
      const auto ulp = [](double x) { return std::nextafter(x, INFINITY) - x; };
      round_trip_ok = round_trip_ok &&
                      std::abs(d.alpha * p.temp_0().value() - p.temp_nr().value()) <=
                          ulp(p.temp_nr().value()) &&
                      std::abs(d.beta * p.t_nr().value() - p.t_0().value()) <= ulp(p.t_0().value());
    }
    record("quantities.scale_consistency", scale_ok);
    record("quantities.round_trip_ulp", round_trip_ok);
  }

  void derivative_consistency(const ModelParams& p, const std::string& label) {
    double worst = 0.0;
    Years worst_t{0.0};
    for (const Years t : lab::log_grid(Years(1e3), Years(1e15), 50)) {
      const Years h = t * 1e-5;
      const double fd = hooks_.ln_gap_difference(p, t + h, t - h) / (2.0 * h.value());
      const double exact = bracket_rate(p, t);
      const double rel = std::abs(fd - exact) / std::abs(exact);
      if (!(rel <= worst)) {
        worst = rel;
        worst_t = t;
      }
    }
    record("gap_model.derivative_consistency" + label, worst <= 1e-6,
           "worst relative mismatch " + fmt(worst) + " at t=" + fmt(worst_t.value()));
  }

  void gap_model() {
    const auto fid = fiducial_params();
    derivative_consistency(fid, "[fiducial]");
    derivative_consistency(random_params(rng_), "[random]");

    const auto crit = solve_critical_times(fid);
    bool signs_ok = crit.exists_pair;
    if (signs_ok) {
      const Years a = *crit.t_cr1;
      const Years b = *crit.t_cr2;
      for (const Years t : lab::log_grid(a * 1e-3, a * 0.999, 20)) signs_ok &= bracket_rate(fid, t) < 0;
      for (const Years t : lab::log_grid(a * 1.001, b * 0.999, 40)) signs_ok &= bracket_rate(fid, t) > 0;
      for (const Years t : lab::log_grid(b * 1.001, b * 1e3, 20)) signs_ok &= bracket_rate(fid, t) < 0;
    }
    record("gap_model.bracket_sign_structure", signs_ok);

    if (crit.exists_pair) {
      const double drop = hooks_.ln_gap_difference(fid, *crit.t_cr2 * 100.0, *crit.t_cr2);
      record("gap_model.vanishing_gap", drop < -1e6, "ln drop " + fmt(drop));
    } else {
      record("gap_model.vanishing_gap", false, "no critical pair");
    }

    bool temp_ok = true;
    double prev = INFINITY;
    for (const Years t : lab::log_grid(Years(1.0), Years(1e20), 200)) {
      const double T = temperature_at(fid, t).value();
      temp_ok = temp_ok && T > 0.0 && T < prev;
      prev = T;
    }
    record("gap_model.temperature_decreasing", temp_ok);

    bool sign_ok = true;
    for (const Years t : lab::log_grid(fid.t_0() * 1e-3, fid.t_0() * 1e10, 50)) {
      const auto g = ln_gap(fid, t);
      sign_ok = sign_ok && g.sign == -1 && std::isfinite(g.ln_magnitude);
    }
    record("gap_model.negative_finite_gap", sign_ok);

    double worst = 0.0;
    for (const double k : {2.0, 10.0, 100.0}) {
      const double s0 = equilibrium_entropy(Kelvin(3.0), 1.0);
      const double s1 = equilibrium_entropy(Kelvin(3.0 / k), k * k * k);
      worst = std::max(worst, std::abs(s1 - s0) / s0);
    }
    record("gap_model.equilibrium_entropy_constant", worst <= 1e-12, "worst " + fmt(worst));
  }

  void roots(const ModelParams& p, const std::string& label) {
    const auto r = solve_critical_times(p);
    const auto d = to_dimensionless(p);
    if (!r.exists_pair) {
      record("critical_times.roots" + label, false, "no critical pair");
      return;
    }
    bool ok = *r.t_cr1 < *r.t_cr2;
    double worst = 0.0;
    for (const Years t : {*r.t_cr1, *r.t_cr2}) {
      const double u = time_to_u(d, t);
      const double resid = std::abs(bracket_rate(p, t) * p.t_0().value());
      worst = std::max(worst, resid / ((2.0 / 3.0) * d.alpha * u));
    }
    ok = ok && worst < 1e-8;
    record("critical_times.root_residual" + label, ok, "worst scaled residual " + fmt(worst));

    const double u1 = r.u_roots[0].u, u2 = r.u_roots[1].u, u3 = r.u_roots[2].u;
    const double sum_err = std::abs(u1 + u2 + u3) / (std::abs(u1) + std::abs(u2) + std::abs(u3));
    const double prod_err = std::abs(u1 * u2 * u3 + d.beta / 2.0) / (d.beta / 2.0);
    const bool one_negative = (u1 < 0) + (u2 < 0) + (u3 < 0) == 1;
    record("critical_times.vieta" + label, sum_err < 1e-9 && prod_err < 1e-9 && one_negative,
           "sum " + fmt(sum_err) + " product " + fmt(prod_err));
  }

  void critical_times() {
    const auto fid = fiducial_params();
    roots(fid, "[fiducial]");
    for (int i = 0; i < 5; ++i) roots(random_params(rng_), "[random " + std::to_string(i) + "]");

    const auto r = solve_critical_times(fid);
    record("critical_times.fiducial_approximation",
           r.exists_pair && *r.rel_err_1 < 0.05 && *r.rel_err_2 < 0.05,
           r.exists_pair ? "rel_err_1 " + fmt(*r.rel_err_1) + " rel_err_2 " + fmt(*r.rel_err_2)
                         : "no pair");

    // Longer nuclear lifetimes shrink beta / alpha^(3/2) and both errors.
    std::vector<double> e1, e2;
    for (const double k : {1.0, 3.0, 10.0, 30.0, 100.0}) {
      const auto p = make_params(fid.temp_nr(), fid.t_nr() * k, fid.t_0(), fid.temp_0());
      const auto rr = solve_critical_times(p);
      e1.push_back(rr.rel_err_1.value_or(NAN));
      e2.push_back(rr.rel_err_2.value_or(NAN));
    }
    bool mono = true;
    for (std::size_t i = 1; i < e1.size(); ++i) mono = mono && e1[i] < e1[i - 1] && e2[i] < e2[i - 1];
    record("critical_times.asymptotic_convergence", mono,
           "rel_err_1 " + fmt(e1.front()) + " -> " + fmt(e1.back()) + ", rel_err_2 " +
               fmt(e2.front()) + " -> " + fmt(e2.back()));

    const auto d = to_dimensionless(fid);
    const double thr = pair_threshold(d);
    const bool below = pair_exists(DimensionlessParams{d.alpha, thr * (1 - 1e-6), d.t_0});
    const bool above = pair_exists(DimensionlessParams{d.alpha, thr * (1 + 1e-6), d.t_0});
    const bool at = pair_exists(DimensionlessParams{d.alpha, thr, d.t_0});
    record("critical_times.pair_boundary", below && !above && !at);
  }

  void spectral() {
    using namespace spectral;
    // Relative entropy sign on random states over random grids.
    bool nonpos = true;
    std::uniform_int_distribution<int> size_dist(2, 64);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const int n = size_dist(rng_);
      std::vector<double> om(static_cast<std::size_t>(n));
      double acc = 0.0;
      for (auto& o : om) o = (acc += 0.01 + unit(rng_));
      auto grid = std::make_shared<const EnergyGrid>(EnergyGrid::with_unit_weights(om));
      const auto draw = [&] {
        std::vector<double> v(om.size());
        double s = 0.0;
        for (auto& x : v) s += (x = unit(rng_) + 1e-12);
        for (auto& x : v) x /= s;
        return SpectralState{grid, v};
      };
      const auto a = draw();
      const auto b = draw();
      nonpos = nonpos && conditional_entropy(a, b) <= 0.0 && conditional_entropy(a, a) == 0.0;
    }
    record("spectral.conditional_entropy_nonpositive", nonpos);

    const auto s = make_oracle_setup(OracleConfig{});
    const double A = 0.5 * [&] {
      double acc = 0.0;
      for (std::size_t i = 0; i < s.base.probs.size(); ++i) {
        if (s.base.probs[i] > 0.0) acc += s.pert.devs[i] * s.pert.devs[i] / s.base.probs[i];
      }
      return acc;
    }();
    const double eps4 = 1e-4;
    const double ex4 = conditional_entropy(state_at(s.base, s.pert, eps4, 0.0, Years(0)), s.base);
    const double scaling_err = std::abs(-ex4 / (eps4 * eps4) - A) / A;
    record("spectral.quadratic_scaling", scaling_err < 1e-3, "relative error " + fmt(scaling_err));

    const double eps3 = 1e-3;
    const double ex3 = conditional_entropy(state_at(s.base, s.pert, eps3, 0.0, Years(0)), s.base);
    const double q3 = hooks_.quadratic_gap(s.base, s.pert, eps3, 0.0, Years(0));
    const double agree = std::abs(q3 - ex3) / std::abs(ex3);
    record("spectral.exact_vs_quadratic", agree < 1e-2, "relative deviation " + fmt(agree));

    const double expo = measure_epsilon_exponent(s);
    record("spectral.epsilon_exponent", std::abs(expo - 2.0) <= 0.01, "exponent " + fmt(expo));

    bool trace_ok = true;
    for (const double amp : {0.0, 0.1, 0.5, 1.0}) {
      for (const double t : {0.0, 1.0, 10.0}) {
        const auto st = state_at(s.base, s.pert, amp, 1.0, Years(t));
        trace_ok = trace_ok && std::abs(::egap::spectral::detail::accurate_sum(st.probs) - 1.0) <= 1e-12;
      }
    }
    record("spectral.trace_conservation", trace_ok);

    OracleConfig fine;
    fine.grid_points *= 2;
    const auto s2 = make_oracle_setup(fine);
    const double ln1 = std::log(-ex3);
    const double ln2 =
        std::log(-conditional_entropy(state_at(s2.base, s2.pert, eps3, 0.0, Years(0)), s2.base));
    const double refine = std::abs(ln2 - ln1) / std::abs(ln1);
    record("spectral.grid_refinement", refine < 1e-3, "relative change " + fmt(refine));
  }

  Hooks hooks_;
  std::mt19937_64 rng_;
  std::vector<CheckResult> results_;
};

}  // namespace detail

/// Runs every module invariant on fiducial and seeded random parameters.
inline std::vector<CheckResult> run_invariant_suite(Fault fault = Fault::none,
                                                    std::uint64_t seed = 20260417) {
  return detail::Suite(fault, seed).run();
}

inline bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results) {
    if (!r.passed) return false;
  }
  return true;
}

}  // namespace egap::check
