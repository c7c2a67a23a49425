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

// gaplab: command-line front end for the entropy-gap model.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "entropy_gap/critical_times.hpp"
#include "entropy_gap/gaplab.hpp"
#include "entropy_gap/invariants.hpp"
#include "entropy_gap/quantities.hpp"
#include "entropy_gap/spectral_oracle.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInvariant = 4;

struct Options {
  std::string config_path;
  egap::ParamOverrides flags;
  double t_dec = egap::kDefaultDecouplingTime.value();
  std::string format = "csv";

  std::optional<double> t;
  std::optional<double> t_ref;
  std::optional<double> t_min;
  std::optional<double> t_max;
  std::optional<std::size_t> points;
  double epsilon_plot = 0.01;

  double temp_nr_min = 1e6, temp_nr_max = 1e8;
  double t_nr_min = 1e6, t_nr_max = 1e9;

  double amplitude = 1e-3;
  bool paper_literal = false;
  double peak_ratio = 20.0;
  double width_fraction = 1.0 / 20.0;
  std::size_t oracle_grid_points = 2048;

  std::string fault = "none";
  std::uint64_t seed = 20260417;
};

egap::ModelParams resolve_params(const Options& o) {
  egap::ParamOverrides merged;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw egap::ValidationError("cannot open config file " + o.config_path);
    merged = egap::read_param_config(in);
  }
  merged.merge(o.flags);
  return merged.apply(egap::fiducial_params());
}

egap::lab::Format resolve_format(const Options& o) {
  return o.format == "jsonl" ? egap::lab::Format::jsonl : egap::lab::Format::csv;
}

egap::lab::CurveSpec resolve_curve(const Options& o) {
  egap::lab::CurveSpec spec;
  if (o.t_min) spec.t_min = egap::Years(*o.t_min);
  if (o.t_max) spec.t_max = egap::Years(*o.t_max);
  if (o.points) spec.n_points = *o.points;
  if (o.t_ref) spec.reference_time = egap::Years(*o.t_ref);
  return spec;
}

int run_check(const Options& o) {
  static const std::map<std::string, egap::check::Fault> faults = {
      {"none", egap::check::Fault::none},
      {"misprinted-exponent", egap::check::Fault::misprinted_exponent},
      {"drop-half", egap::check::Fault::drop_half}};
  const auto results = egap::check::run_invariant_suite(faults.at(o.fault), o.seed);
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
    std::cout << '\n';
  }
  if (egap::check::all_passed(results)) return 0;
  for (const auto& r : results) {
    if (!r.passed) std::cerr << "invariant failed: " << r.name << '\n';
  }
  return kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-gap model: critical times, curves, sweeps and the spectral oracle"};
  app.require_subcommand(1);
  Options o;

  const auto add_param_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config_path, "key=value parameter file");
    cmd->add_option("--temp-nr", o.flags.temp_nr_kelvin, "nuclear energy scale [K]");
    cmd->add_option("--t-nr", o.flags.t_nr_years, "nuclear mean life [yr]");
    cmd->add_option("--t0", o.flags.t_0_years, "age of the universe [yr]");
    cmd->add_option("--temp0", o.flags.temp_0_kelvin, "present temperature [K]");
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"csv", "jsonl"}));
  };

  auto* eval = app.add_subcommand("eval", "temperature, gap and growth rate at one time");
  add_param_flags(eval);
  eval->add_option("--t", o.t, "time [yr]")->required();
  eval->add_option("--t-ref", o.t_ref, "reference time for ln_gap_rel [yr] (default t0)");

  auto* crit = app.add_subcommand("crit", "exact and approximate critical times");
  add_param_flags(crit);
  crit->add_option("--t-dec", o.t_dec, "decoupling time [yr]");

  auto* curve = app.add_subcommand("curve", "sampled gap curve (CSV)");
  add_param_flags(curve);
  curve->add_option("--t-min", o.t_min, "first time [yr]");
  curve->add_option("--t-max", o.t_max, "last time [yr]");
  curve->add_option("--points", o.points, "number of log-spaced samples");
  curve->add_option("--t-ref", o.t_ref, "reference time [yr] (default t0)");

  auto* fig1 = app.add_subcommand("fig1", "maximum and actual entropy curves (CSV)");
  add_param_flags(fig1);
  fig1->add_option("--t-min", o.t_min, "first time [yr]");
  fig1->add_option("--t-max", o.t_max, "last time [yr]");
  fig1->add_option("--points", o.points, "number of log-spaced samples");
  fig1->add_option("--epsilon-plot", o.epsilon_plot, "gap depth at t_cr2, in (0, 1)");

  auto* sweep = app.add_subcommand("sweep", "critical times over a (temp_nr, t_nr) grid");
  add_param_flags(sweep);
  sweep->add_option("--t-dec", o.t_dec, "decoupling time [yr]");
  sweep->add_option("--points", o.points, "points per axis (default 10)");
  sweep->add_option("--temp-nr-min", o.temp_nr_min, "[K]");
  sweep->add_option("--temp-nr-max", o.temp_nr_max, "[K]");
  sweep->add_option("--t-nr-min", o.t_nr_min, "[yr]");
  sweep->add_option("--t-nr-max", o.t_nr_max, "[yr]");

  auto* oracle = app.add_subcommand("oracle", "exact vs expanded gap on a discretised spectrum");
  add_param_flags(oracle);
  oracle->add_option("--amplitude", o.amplitude, "peak fractional deviation at t = 0");
  oracle->add_option("--t-min", o.t_min, "first time [yr] (default 0)");
  oracle->add_option("--t-max", o.t_max, "last time [yr] (default 5 t_nr)");
  oracle->add_option("--points", o.points, "number of linearly spaced times (default 11)");
  oracle->add_flag("--paper-literal", o.paper_literal,
                   "single decay factor and no 1/2 in the expanded gap");
  oracle->add_option("--peak-ratio", o.peak_ratio, "omega_1 / T of the bump");
  oracle->add_option("--width-fraction", o.width_fraction, "bump width / omega_1");
  oracle->add_option("--grid-points", o.oracle_grid_points, "energy grid size");

  auto* check = app.add_subcommand("check", "run the invariant suite");
  check->add_option("--inject-fault", o.fault, "deliberate defect")
      ->check(CLI::IsMember({"none", "misprinted-exponent", "drop-half"}));
  check->add_option("--seed", o.seed, "seed for randomised checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    const auto fmt = resolve_format(o);
    if (*check) return run_check(o);
    const auto p = resolve_params(o);
    if (*eval) {
      const std::optional<egap::Years> ref =
          o.t_ref ? std::optional(egap::Years(*o.t_ref)) : std::nullopt;
      egap::lab::write_table(std::cout, egap::lab::eval_table(p, egap::Years(*o.t), ref), fmt);
    } else if (*crit) {
      egap::lab::write_table(std::cout, egap::lab::crit_table(p, egap::Years(o.t_dec)), fmt);
    } else if (*curve) {
      egap::lab::write_table(std::cout, egap::lab::curve_table(p, resolve_curve(o)), fmt);
    } else if (*fig1) {
      egap::lab::write_table(std::cout, egap::lab::fig1_table(p, o.epsilon_plot, resolve_curve(o)),
                             fmt);
    } else if (*sweep) {
      egap::lab::SweepSpec spec;
      spec.temp_nr_lo = egap::Kelvin(o.temp_nr_min);
      spec.temp_nr_hi = egap::Kelvin(o.temp_nr_max);
      spec.t_nr_lo = egap::Years(o.t_nr_min);
      spec.t_nr_hi = egap::Years(o.t_nr_max);
      spec.points_per_axis = o.points.value_or(10);
      spec.t_0 = p.t_0();
      spec.temp_0 = p.temp_0();
      egap::lab::write_table(std::cout, egap::lab::sweep_table(spec, egap::Years(o.t_dec)), fmt);
    } else if (*oracle) {
      egap::spectral::OracleConfig cfg;
      cfg.peak_ratio = o.peak_ratio;
      cfg.width_fraction = o.width_fraction;
      cfg.grid_points = o.oracle_grid_points;
      cfg.convention = o.paper_literal ? egap::spectral::GapConvention::paper_literal
                                       : egap::spectral::GapConvention::derivation_consistent;
      const auto times = egap::lab::linear_grid(egap::Years(o.t_min.value_or(0.0)),
                                                egap::Years(o.t_max.value_or(5.0 * p.t_nr().value())),
                                                o.points.value_or(11));
      egap::lab::write_table(std::cout, egap::lab::oracle_table(p, cfg, o.amplitude, times), fmt);
    }
  } catch (const egap::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const egap::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const egap::SupportViolation& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
