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

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "entropy_gap/gaplab.hpp"
#include "entropy_gap/invariants.hpp"

using namespace egap;
using namespace egap::lab;

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, sep);) out.push_back(cell);
  return out;
}

// Data lines of a CSV stream, header first; comment lines dropped.
std::vector<std::vector<std::string>> csv_lines(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) {
    if (!line.empty() && line[0] != '#') out.push_back(split(line));
  }
  return out;
}

std::string render(const Table& t, Format f = Format::csv) {
  std::ostringstream out;
  write_table(out, t, f);
  return out.str();
}

int run_gaplab(const std::string& args) {
  const std::string cmd = std::string(GAPLAB_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Format, SeventeenSignificantDigits) {
  EXPECT_EQ(format_double(1.0), "1.0000000000000000e+00");
  EXPECT_EQ(format_double(-1.5e10), "-1.5000000000000000e+10");
  EXPECT_EQ(format_double(NAN), "nan");
  EXPECT_EQ(format_double(-INFINITY), "-inf");
  for (const double v : {0.1, 1.0 / 3.0, 318286.47070125723, 4.8773046888278984e13}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(Csv, LayoutAndComments) {
  Table t;
  t.columns = {"a", "b", "c", "d"};
  t.rows = {{1.0, std::int64_t{2}, true, std::string("x")}};
  t.header_comments = {"k=v"};
  t.trailing_comments = {"done"};
  EXPECT_EQ(render(t), "# k=v\na,b,c,d\n1.0000000000000000e+00,2,true,x\n# done\n");
}

TEST(Jsonl, SameFieldsAsCsv) {
  const auto p = fiducial_params();
  CurveSpec spec;
  spec.n_points = 5;
  const auto tab = curve_table(p, spec);
  std::stringstream ss(render(tab, Format::jsonl));
  std::size_t records = 0;
  for (std::string line; std::getline(ss, line);) {
    const auto j = nlohmann::json::parse(line);
    if (j.contains("comment")) continue;
    for (const auto& col : tab.columns) EXPECT_TRUE(j.contains(col)) << col;
    EXPECT_EQ(j.size(), tab.columns.size());
    ++records;
  }
  EXPECT_EQ(records, 5u);
}

TEST(Grids, LogGridEndpointsExact) {
  const auto g = log_grid(Years(1e3), Years(1e16), 400);
  ASSERT_EQ(g.size(), 400u);
  EXPECT_EQ(g.front().value(), 1e3);
  EXPECT_EQ(g.back().value(), 1e16);
  EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
  EXPECT_THROW(log_grid(Years(0.0), Years(1.0), 3), ValidationError);
  EXPECT_THROW(log_grid(Years(2.0), Years(1.0), 3), ValidationError);
  EXPECT_THROW(log_grid(Years(1.0), Years(2.0), 1), ValidationError);
}

TEST(Eval, FiducialAtPresent) {
  const auto p = fiducial_params();
  const auto r = evaluate(p, p.t_0());
  EXPECT_DOUBLE_EQ(r.temperature.value(), 3.0);
  EXPECT_EQ(r.ln_gap_rel, 0.0);
  EXPECT_NEAR(r.bracket_per_year, 1.381468148148148e-05, 1e-18);
  EXPECT_EQ(r.phase, Phase::between);
  EXPECT_THROW(evaluate(p, Years(0.0)), ValidationError);
}

TEST(Eval, AtLateCriticalTime) {
  const auto p = fiducial_params();
  const auto crit = solve_critical_times(p);
  const auto r = evaluate(p, *crit.t_cr2);
  EXPECT_EQ(r.phase, Phase::at_tcr2);
  // |bracket| relative to its largest term, 1/t_nr.
  EXPECT_LE(std::abs(r.bracket_per_year), 1e-12 / p.t_nr().value());
}

TEST(Curve, ExtremaFollowCriticalTimes) {
  const auto p = fiducial_params();
  const auto crit = solve_critical_times(p);
  const auto pts = sample_curve(p, CurveSpec{});
  ASSERT_EQ(pts.size(), 400u);
  const auto by_gap = [](const GapCurvePoint& a, const GapCurvePoint& b) { return a.ln_gap_rel < b.ln_gap_rel; };
  const auto hi = std::max_element(pts.begin(), pts.end(), by_gap);
  // The global minimum is the far end (the gap vanishes); t_cr1 is the
  // minimum of the rising part.
  const auto lo = std::min_element(pts.begin(), hi, by_gap);
  EXPECT_EQ(std::min_element(pts.begin(), pts.end(), by_gap), pts.end() - 1);
  const auto nearest = [&](Years t) {
    return std::min_element(pts.begin(), pts.end(), [&](const auto& a, const auto& b) {
      return std::abs(std::log(a.t / t)) < std::abs(std::log(b.t / t));
    });
  };
  EXPECT_EQ(lo, nearest(*crit.t_cr1));
  EXPECT_EQ(hi, nearest(*crit.t_cr2));
  for (auto it = hi + 1; it != pts.end(); ++it) EXPECT_LT(it->ln_gap_rel, (it - 1)->ln_gap_rel);
}

TEST(Curve, ReferenceRowIsZero) {
  const auto p = fiducial_params();
  CurveSpec spec;
  spec.t_min = Years(1.5e10);
  spec.t_max = Years(1.5e12);
  spec.n_points = 5;
  const auto pts = sample_curve(p, spec);
  EXPECT_EQ(pts[0].ln_gap_rel, 0.0);
  spec.reference_time = Years(1.5e12);
  EXPECT_EQ(sample_curve(p, spec).back().ln_gap_rel, 0.0);
}

TEST(Curve, CsvRoundTrip) {
  const auto p = fiducial_params();
  const auto tab = curve_table(p, CurveSpec{});
  const auto lines = csv_lines(render(tab));
  ASSERT_EQ(lines.front(), (std::vector<std::string>{"t_years", "ln_gap_rel", "bracket_per_year", "phase"}));
  ASSERT_EQ(lines.size(), 401u);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const double t = std::stod(lines[i][0]);
    const double printed = std::stod(lines[i][1]);
    const double again = ln_gap_difference(p, Years(t), p.t_0());
    EXPECT_LE(std::abs(printed - again), 1e-14 * std::abs(again)) << lines[i][0];
  }
}

TEST(Curve, ByteIdentical) {
  const auto p = fiducial_params();
  EXPECT_EQ(render(curve_table(p, CurveSpec{})), render(curve_table(p, CurveSpec{})));
}

TEST(Fig1, DipAndDecay) {
  const auto p = fiducial_params();
  const auto crit = solve_critical_times(p);
  CurveSpec spec;
  spec.t_max = *crit.t_cr2 * 1000.0;
  const double eps = 0.01;
  const auto tab = fig1_table(p, eps, spec);
  const auto lines = csv_lines(render(tab));
  ASSERT_EQ(lines.front(), (std::vector<std::string>{"t_years", "s_max", "s_act"}));
  double min_s = 2.0, min_t = 0.0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const double s_max = std::stod(lines[i][1]);
    const double s_act = std::stod(lines[i][2]);
    EXPECT_EQ(s_max, 1.0);
    EXPECT_LE(s_act, s_max);
    if (s_act < min_s) {
      min_s = s_act;
      min_t = std::stod(lines[i][0]);
    }
  }
  EXPECT_DOUBLE_EQ(min_s, 1.0 - eps);
  EXPECT_DOUBLE_EQ(min_t, crit.t_cr2->value());
  EXPECT_GT(std::stod(lines.back()[2]), 1.0 - 1e-3 * eps);
}

TEST(Fig1, Validation) {
  const auto p = fiducial_params();
  EXPECT_THROW(fig1_table(p, 0.0, CurveSpec{}), ValidationError);
  EXPECT_THROW(fig1_table(p, 1.0, CurveSpec{}), ValidationError);
}

TEST(Crit, ReportLines) {
  const auto text = render(crit_table(fiducial_params()));
  EXPECT_NE(text.find("pass: t_cr2 <= 1e4 t_0"), std::string::npos);
  EXPECT_NE(text.find("quoted_t_cr1_years"), std::string::npos);
  const auto no_pair = make_params(Kelvin(6.0), Years(1.0), Years(1.5e10), Kelvin(3.0));
  EXPECT_NE(render(crit_table(no_pair)).find("no critical pair"), std::string::npos);
}

TEST(Sweep, DefaultRangesAllHavePairAndOrdering) {
  const auto rows = run_sweep(SweepSpec{});
  ASSERT_EQ(rows.size(), 100u);
  for (const auto& r : rows) {
    ASSERT_TRUE(r.report.exists_pair);
    EXPECT_LT(*r.report.t_cr1, Years(1.5e10));
    EXPECT_LT(Years(1.5e10), *r.report.t_cr2);
  }
  // Row-major: temp_nr outer, t_nr inner.
  EXPECT_EQ(rows[0].temp_nr.value(), 1e6);
  EXPECT_EQ(rows[1].temp_nr.value(), 1e6);
  EXPECT_EQ(rows[9].t_nr.value(), 1e9);
  EXPECT_EQ(rows[10].temp_nr.value(), rows[19].temp_nr.value());
  EXPECT_EQ(rows[99].temp_nr.value(), 1e8);
}

TEST(Sweep, ThreadCountDoesNotChangeOutput) {
  const auto one = run_sweep(SweepSpec{}, kDefaultDecouplingTime, 1);
  const auto many = run_sweep(SweepSpec{}, kDefaultDecouplingTime, 7);
  ASSERT_EQ(one.size(), many.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].report.t_cr1->value(), many[i].report.t_cr1->value());
    EXPECT_EQ(one[i].report.t_cr2->value(), many[i].report.t_cr2->value());
  }
  EXPECT_EQ(render(sweep_table(SweepSpec{})), render(sweep_table(SweepSpec{})));
}

TEST(Sweep, TwoByTwoShape) {
  SweepSpec spec;
  spec.points_per_axis = 2;
  const auto lines = csv_lines(render(sweep_table(spec)));
  EXPECT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines.front().size(), 14u);
  spec.points_per_axis = 1;
  EXPECT_THROW(run_sweep(spec), ValidationError);
}

TEST(OracleTable, TrailingExponent) {
  const auto p = fiducial_params();
  const auto times = linear_grid(Years(0.0), Years(5e6), 11);
  const auto text = render(oracle_table(p, spectral::OracleConfig{}, 1e-3, times));
  const auto pos = text.find("# epsilon_scaling_exponent=");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_NEAR(std::stod(text.substr(pos + 27)), 2.0, 0.01);
  const auto lines = csv_lines(text);
  ASSERT_EQ(lines.size(), 12u);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    EXPECT_LE(std::stod(lines[i][2]), 0.0);
    EXPECT_LT(std::abs(std::stod(lines[i][7])), 1e-2);
  }
}

TEST(InvariantSuite, PassesOnCorrectBuild) {
  const auto results = check::run_invariant_suite();
  for (const auto& r : results) EXPECT_TRUE(r.passed) << r.name << " " << r.detail;
  EXPECT_TRUE(check::all_passed(results));
}

TEST(InvariantSuite, FaultsAreCaught) {
  const auto failed = [](check::Fault f) {
    std::vector<std::string> names;
    for (const auto& r : check::run_invariant_suite(f)) {
      if (!r.passed) names.push_back(r.name);
    }
    return names;
  };
  const auto misprint = failed(check::Fault::misprinted_exponent);
  EXPECT_TRUE(std::any_of(misprint.begin(), misprint.end(), [](const std::string& n) {
    return n.starts_with("gap_model.derivative_consistency");
  }));
  const auto half = failed(check::Fault::drop_half);
  EXPECT_NE(std::find(half.begin(), half.end(), "spectral.exact_vs_quadratic"), half.end());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_gaplab("eval --t 1.5e10"), 0);
  EXPECT_EQ(run_gaplab("eval --t 0"), 2);
  EXPECT_EQ(run_gaplab("eval --t 1e10 --temp-nr 1 --temp0 3"), 2);
  EXPECT_EQ(run_gaplab("crit"), 0);
  EXPECT_EQ(run_gaplab("crit --format xml"), 2);
  EXPECT_EQ(run_gaplab("curve --points 1"), 2);
  EXPECT_EQ(run_gaplab("fig1 --epsilon-plot 2"), 2);
  EXPECT_EQ(run_gaplab("oracle --amplitude -1"), 2);
  EXPECT_EQ(run_gaplab("oracle --amplitude 1e12"), 2);
  EXPECT_EQ(run_gaplab("nonsense"), 2);
  EXPECT_EQ(run_gaplab("check --inject-fault drop-half"), 4);
}
