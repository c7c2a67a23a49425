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
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <future>
#include <ostream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "entropy_gap/critical_times.hpp"
#include "entropy_gap/gap_model.hpp"
#include "entropy_gap/quantities.hpp"
#include "entropy_gap/spectral_oracle.hpp"

namespace egap::lab {

// ---------------------------------------------------------------------------
// Tabular output

using Cell = std::variant<double, std::int64_t, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> header_comments;
  std::vector<std::string> trailing_comments;
};

enum class Format { csv, jsonl };

/// 17 significant digits, scientific notation.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline std::string format_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return v;
        }
      },
      c);
}

inline void write_csv(std::ostream& out, const Table& t) {
  for (const auto& c : t.header_comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
    out << '\n';
  }
  for (const auto& c : t.trailing_comments) out << "# " << c << '\n';
}

/// One JSON object per row. Comment lines become {"comment": "..."} records.
inline void write_jsonl(std::ostream& out, const Table& t) {
  for (const auto& c : t.header_comments) out << nlohmann::json{{"comment", c}}.dump() << '\n';
  for (const auto& row : t.rows) {
    nlohmann::ordered_json rec;
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::visit([&](const auto& v) { rec[t.columns[i]] = v; }, row[i]);
    }
    out << rec.dump() << '\n';
  }
  for (const auto& c : t.trailing_comments) out << nlohmann::json{{"comment", c}}.dump() << '\n';
}

inline void write_table(std::ostream& out, const Table& t, Format f) {
  if (f == Format::csv) {
    write_csv(out, t);
  } else {
    write_jsonl(out, t);
  }
}

inline std::vector<std::string> param_comments(const ModelParams& p) {
  return {"temp_nr_kelvin=" + format_double(p.temp_nr().value()),
          "t_nr_years=" + format_double(p.t_nr().value()),
          "t_0_years=" + format_double(p.t_0().value()),
          "temp_0_kelvin=" + format_double(p.temp_0().value())};
}

// ---------------------------------------------------------------------------
// Grids

/// n log-spaced times with exact endpoints.
inline std::vector<Years> log_grid(Years lo, Years hi, std::size_t n) {
  if (!(lo.value() > 0.0) || !(hi > lo) || !std::isfinite(hi.value())) {
    throw ValidationError("time range needs 0 < t_min < t_max");
  }
  if (n < 2) throw ValidationError("need at least 2 points");
  std::vector<Years> out(n);
  const double a = std::log(lo.value());
  const double b = std::log(hi.value());
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = Years(std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1)));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

inline std::vector<Years> linear_grid(Years lo, Years hi, std::size_t n) {
  if (!(lo.value() >= 0.0) || !(hi > lo) || !std::isfinite(hi.value())) {
    throw ValidationError("time range needs 0 <= t_min < t_max");
  }
  if (n < 2) throw ValidationError("need at least 2 points");
  std::vector<Years> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n - 1);
    out[i] = Years(lo.value() + f * (hi.value() - lo.value()));
  }
  out.back() = hi;
  return out;
}

// ---------------------------------------------------------------------------
// eval

struct EvalRecord {
  Years t;
  Kelvin temperature;
  double ln_gap_rel;
  double bracket_per_year;
  Phase phase;
};

inline EvalRecord evaluate(const ModelParams& p, Years t, std::optional<Years> reference = {}) {
  const Years t_ref = reference ? *reference : p.t_0();
  const auto crit = solve_critical_times(p);
  return EvalRecord{t, temperature_at(p, t), ln_gap_difference(p, t, t_ref), bracket_rate(p, t),
                    classify_phase(t, crit.t_cr1, crit.t_cr2)};
}

inline Table eval_table(const ModelParams& p, Years t, std::optional<Years> reference = {}) {
  const auto r = evaluate(p, t, reference);
  Table tab;
  tab.header_comments = param_comments(p);
  tab.header_comments.push_back("reference_time_years=" +
                                format_double(reference.value_or(p.t_0()).value()));
  tab.columns = {"t_years", "temperature_kelvin", "ln_gap_rel", "bracket_per_year", "phase"};
  tab.rows.push_back({r.t.value(), r.temperature.value(), r.ln_gap_rel, r.bracket_per_year,
                      std::string(to_string(r.phase))});
  return tab;
}

// ---------------------------------------------------------------------------
// curve / fig1

struct CurveSpec {
  Years t_min{1e3};
  Years t_max{1e16};
  std::size_t n_points = 400;
  std::optional<Years> reference_time;

  void validate() const {
    if (!(t_min.value() > 0.0) || !(t_max > t_min) || !std::isfinite(t_max.value())) {
      throw ValidationError("curve needs 0 < t_min < t_max");
    }
    if (n_points < 2) throw ValidationError("curve needs at least 2 points");
  }
};

inline std::vector<GapCurvePoint> sample_curve(const ModelParams& p, const CurveSpec& spec) {
  spec.validate();
  const Years t_ref = spec.reference_time.value_or(p.t_0());
  const auto crit = solve_critical_times(p);
  std::vector<GapCurvePoint> out;
  for (const Years t : log_grid(spec.t_min, spec.t_max, spec.n_points)) {
    out.push_back({t, ln_gap_difference(p, t, t_ref), bracket_rate(p, t),
                   classify_phase(t, crit.t_cr1, crit.t_cr2)});
  }
  return out;
}

inline Table curve_table(const ModelParams& p, const CurveSpec& spec) {
  const auto pts = sample_curve(p, spec);
  Table tab;
  tab.header_comments = param_comments(p);
  tab.header_comments.push_back("reference_time_years=" +
                                format_double(spec.reference_time.value_or(p.t_0()).value()));
  tab.columns = {"t_years", "ln_gap_rel", "bracket_per_year", "phase"};
  for (const auto& pt : pts) {
    tab.rows.push_back(
        {pt.t.value(), pt.ln_gap_rel, pt.bracket, std::string(to_string(pt.phase))});
  }
  return tab;
}

inline Table fig1_table(const ModelParams& p, double epsilon_plot, const CurveSpec& spec) {
  spec.validate();
  if (!(epsilon_plot > 0.0 && epsilon_plot < 1.0)) {
    throw ValidationError("epsilon_plot must lie in (0, 1)");
  }
  // The dip at t_cr2 is far narrower than any practical log spacing, so the
  // critical time itself is always sampled when it lies in range.
  auto grid = log_grid(spec.t_min, spec.t_max, spec.n_points);
  const auto crit = solve_critical_times(p);
  if (!crit.exists_pair) {
    throw ValidationError("no critical pair: the gap has no deepest point to normalise at");
  }
  const Years t_cr2 = *crit.t_cr2;
  if (t_cr2 > spec.t_min && t_cr2 < spec.t_max) {
    const auto at = std::lower_bound(grid.begin(), grid.end(), t_cr2);
    if (*at != t_cr2) grid.insert(at, t_cr2);
  }
  const auto pts = actual_entropy_curve(p, epsilon_plot, grid, t_cr2);
  Table tab;
  tab.header_comments = param_comments(p);
  tab.header_comments.push_back("epsilon_plot=" + format_double(epsilon_plot));
  tab.columns = {"t_years", "s_max", "s_act"};
  for (const auto& pt : pts) tab.rows.push_back({pt.t.value(), pt.s_max, pt.s_act});
  return tab;
}

// ---------------------------------------------------------------------------
// crit

inline Table crit_table(const ModelParams& p, Years t_dec = kDefaultDecouplingTime) {
  const auto r = solve_critical_times(p, t_dec);
  const auto d = to_dimensionless(p);
  Table tab;
  tab.header_comments = param_comments(p);
  tab.header_comments.push_back("t_dec_years=" + format_double(t_dec.value()));
  tab.columns = {"quantity", "value", "note"};
  const auto add = [&](std::string name, Cell v, std::string note = "") {
    tab.rows.push_back({std::move(name), std::move(v), std::move(note)});
  };
  add("alpha", d.alpha);
  add("beta", d.beta);
  add("pair_threshold", pair_threshold(d), "pair exists iff beta < threshold");
  add("exists_pair", r.exists_pair, r.exists_pair ? "" : "no critical pair");
  add("approx_t_cr1_years", r.approx_t_cr1.value(), "early root with beta dropped");
  add("approx_t_cr2_years", r.approx_t_cr2.value(), "late root with 2 t_0/t dropped");
  if (!r.exists_pair) return tab;

  const auto validity_note = [&](const RootValidity& v) {
    if (!v.after_decoupling) return std::string("excluded: before decoupling");
    if (!v.after_t_nr) return std::string("excluded: before t_nr");
    return std::string("within model validity");
  };
  for (const auto& root : r.u_roots) add(std::string("u_") + to_string(root.kind), root.u);
  add("t_cr1_years", r.t_cr1->value(), validity_note(r.valid_1));
  add("t_cr2_years", r.t_cr2->value(), validity_note(r.valid_2));
  add("t_cr2_over_t0", *r.t_cr2 / p.t_0());
  add("rel_err_1", *r.rel_err_1);
  add("rel_err_2", *r.rel_err_2);
  add("t_cr1_after_decoupling", r.valid_1.after_decoupling);
  add("t_cr1_after_t_nr", r.valid_1.after_t_nr);
  add("t_cr2_after_decoupling", r.valid_2.after_decoupling);
  add("t_cr2_after_t_nr", r.valid_2.after_t_nr);
  add("ordering_t_cr1_lt_t0_lt_t_cr2", *r.t_cr1 < p.t_0() && p.t_0() < *r.t_cr2);

  // Published estimates for the fiducial point, for comparison.
  constexpr double kQuotedTcr1 = 1.5e3;
  const double ratio = r.t_cr1->value() / kQuotedTcr1;
  const bool same_order = ratio > 0.1 && ratio < 10.0;
  add("quoted_t_cr1_years", kQuotedTcr1,
      std::string(same_order ? "order-of-magnitude agreement" : "disagrees beyond x10") +
          " (ratio " + format_double(ratio) + ")");
  const bool bound_ok = r.t_cr2->value() <= 1e4 * p.t_0().value();
  add("quoted_t_cr2_bound_years", 1e4 * p.t_0().value(),
      bound_ok ? "pass: t_cr2 <= 1e4 t_0" : "fail: t_cr2 > 1e4 t_0");
  return tab;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepSpec {
  Kelvin temp_nr_lo{1e6};
  Kelvin temp_nr_hi{1e8};
  Years t_nr_lo{1e6};
  Years t_nr_hi{1e9};
  std::size_t points_per_axis = 10;
  Years t_0{1.5e10};
  Kelvin temp_0{3.0};

  void validate() const {
    if (!(temp_nr_lo.value() > 0.0) || !(temp_nr_hi > temp_nr_lo)) {
      throw ValidationError("temp_nr range needs 0 < lo < hi");
    }
    if (!(t_nr_lo.value() > 0.0) || !(t_nr_hi > t_nr_lo)) {
      throw ValidationError("t_nr range needs 0 < lo < hi");
    }
    if (points_per_axis < 2) throw ValidationError("sweep needs at least 2 points per axis");
  }
};

struct SweepRow {
  Kelvin temp_nr;
  Years t_nr;
  CriticalTimesReport report;
  double alpha;
  double beta;
};

/// Row-major over (temp_nr, t_nr), both log-spaced. Points are evaluated on
/// worker threads; the result order never depends on scheduling.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, Years t_dec = kDefaultDecouplingTime,
                                       unsigned threads = std::thread::hardware_concurrency()) {
  spec.validate();
  const auto temps = log_grid(Years(spec.temp_nr_lo.value()), Years(spec.temp_nr_hi.value()),
                              spec.points_per_axis);
  const auto lifes = log_grid(spec.t_nr_lo, spec.t_nr_hi, spec.points_per_axis);
  const std::size_t n = temps.size() * lifes.size();
  std::vector<SweepRow> rows(n);
  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const Kelvin temp_nr(temps[k / lifes.size()].value());
      const Years t_nr = lifes[k % lifes.size()];
      const auto p = make_params(temp_nr, t_nr, spec.t_0, spec.temp_0);
      const auto d = to_dimensionless(p);
      rows[k] = SweepRow{temp_nr, t_nr, solve_critical_times(p, t_dec), d.alpha, d.beta};
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  std::vector<std::future<void>> jobs;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    jobs.push_back(std::async(std::launch::async, work, begin, std::min(n, begin + chunk)));
  }
  for (auto& j : jobs) j.get();
  return rows;
}

inline Table sweep_table(const SweepSpec& spec, Years t_dec = kDefaultDecouplingTime) {
  const auto rows = run_sweep(spec, t_dec);
  Table tab;
  tab.header_comments = {"t_0_years=" + format_double(spec.t_0.value()),
                         "temp_0_kelvin=" + format_double(spec.temp_0.value()),
                         "t_dec_years=" + format_double(t_dec.value())};
  tab.columns = {"temp_nr",        "t_nr",          "alpha",
                 "beta",           "pair_exists",   "t_cr1_years",
                 "t_cr2_years",    "t_cr2_over_t0", "rel_err_1",
                 "rel_err_2",      "t_cr1_after_decoupling", "t_cr1_after_t_nr",
                 "t_cr2_after_decoupling", "t_cr2_after_t_nr"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : rows) {
    const auto& c = r.report;
    tab.rows.push_back({r.temp_nr.value(), r.t_nr.value(), r.alpha, r.beta, c.exists_pair,
                        c.t_cr1 ? c.t_cr1->value() : nan, c.t_cr2 ? c.t_cr2->value() : nan,
                        c.t_cr2 ? *c.t_cr2 / spec.t_0 : nan, c.rel_err_1.value_or(nan),
                        c.rel_err_2.value_or(nan), c.valid_1.after_decoupling,
                        c.valid_1.after_t_nr, c.valid_2.after_decoupling, c.valid_2.after_t_nr});
  }
  return tab;
}

// ---------------------------------------------------------------------------
// oracle

inline Table oracle_table(const ModelParams& p, const spectral::OracleConfig& config,
                          double amplitude, std::span<const Years> t_grid) {
  const auto rep = spectral::oracle_report(p, config, amplitude, t_grid);
  Table tab;
  tab.header_comments = param_comments(p);
  tab.header_comments.push_back("oracle_temp_kelvin=" + format_double(config.temp));
  tab.header_comments.push_back("oracle_peak_ratio=" + format_double(config.peak_ratio));
  tab.header_comments.push_back("oracle_width_fraction=" + format_double(config.width_fraction) +
                                " (results depend on this choice)");
  tab.header_comments.push_back("oracle_grid_points=" + std::to_string(config.grid_points));
  tab.header_comments.push_back(
      std::string("convention=") +
      (config.convention == spectral::GapConvention::paper_literal ? "paper_literal"
                                                                   : "derivation_consistent"));
  tab.header_comments.push_back("amplitude=" + format_double(amplitude));
  tab.columns = {"t_years",         "epsilon",          "delta_s_exact",     "delta_s_quadratic",
                 "delta_s_wien",    "ln_abs_exact",     "ln_abs_quadratic",  "rel_dev_quadratic",
                 "rel_dev_wien"};
  for (const auto& r : rep.rows) {
    tab.rows.push_back({r.t.value(), r.epsilon, r.delta_s_exact, r.delta_s_quadratic,
                        r.delta_s_wien, r.ln_abs_exact, r.ln_abs_quadratic, r.rel_dev_quadratic,
                        r.rel_dev_wien});
  }
  if (rep.decay_rate_over_gamma) {
    tab.trailing_comments.push_back("decay_rate_over_gamma=" +
                                    format_double(*rep.decay_rate_over_gamma));
  }
  tab.trailing_comments.push_back("epsilon_scaling_exponent=" +
                                  format_double(rep.epsilon_exponent));
  return tab;
}

}  // namespace egap::lab
