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

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

#include "entropy_gap/errors.hpp"
#include "entropy_gap/units.hpp"

namespace egap {

/// The four physical inputs of the model. Energies are temperatures
/// (k_B = 1) and times are years. Instances are always valid: every field is
/// finite and positive, and temp_nr > temp_0.
class ModelParams {
 public:
  /// Validating constructor. Throws ValidationError naming the offending
  /// field, or WienLimitError when temp_nr <= temp_0.
  static ModelParams make(Kelvin temp_nr, Years t_nr, Years t_0, Kelvin temp_0) {
    check_positive("temp_nr", temp_nr.value());
    check_positive("t_nr", t_nr.value());
    check_positive("t_0", t_0.value());
    check_positive("temp_0", temp_0.value());
    if (!(temp_nr > temp_0)) {
      throw WienLimitError("temp_nr (" + std::to_string(temp_nr.value()) +
                           " K) must exceed temp_0 (" + std::to_string(temp_0.value()) + " K)");
    }
    return ModelParams(temp_nr, t_nr, t_0, temp_0);
  }

  /// Characteristic nuclear energy, omega_1.
  [[nodiscard]] Kelvin temp_nr() const { return temp_nr_; }
  /// Nuclear mean life, 1/gamma.
  [[nodiscard]] Years t_nr() const { return t_nr_; }
  /// Age of the universe.
  [[nodiscard]] Years t_0() const { return t_0_; }
  /// Present radiation temperature.
  [[nodiscard]] Kelvin temp_0() const { return temp_0_; }
  /// Nuclear burning rate gamma, per year.
  [[nodiscard]] double gamma() const { return 1.0 / t_nr_.value(); }

  bool operator==(const ModelParams&) const = default;

 private:
  ModelParams(Kelvin temp_nr, Years t_nr, Years t_0, Kelvin temp_0)
      : temp_nr_(temp_nr), t_nr_(t_nr), t_0_(t_0), temp_0_(temp_0) {}

  static void check_positive(const char* field, double v) {
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw ValidationError(std::string(field) + " must be finite and positive, got " +
                            std::to_string(v));
    }
  }

  Kelvin temp_nr_;
  Years t_nr_;
  Years t_0_;
  Kelvin temp_0_;
};

inline ModelParams make_params(Kelvin temp_nr, Years t_nr, Years t_0, Kelvin temp_0) {
  return ModelParams::make(temp_nr, t_nr, t_0, temp_0);
}

/// Lower bounds of the nuclear ranges with the present-day t_0 and T_0.
inline ModelParams fiducial_params() {
  return ModelParams::make(Kelvin(1e6), Years(1e6), Years(1.5e10), Kelvin(3.0));
}

/// alpha = omega_1 / T_0 and beta = gamma * t_0, plus t_0 for mapping
/// dimensionless times back to years.
struct DimensionlessParams {
  double alpha;
  double beta;
  Years t_0;

  static DimensionlessParams make(double alpha, double beta, Years t_0 = Years(1.0)) {
    if (!std::isfinite(alpha) || !(alpha > 0.0)) {
      throw ValidationError("alpha must be finite and positive");
    }
    if (!std::isfinite(beta) || !(beta > 0.0)) {
      throw ValidationError("beta must be finite and positive");
    }
    if (!std::isfinite(t_0.value()) || !(t_0.value() > 0.0)) {
      throw ValidationError("t_0 must be finite and positive");
    }
    return DimensionlessParams{alpha, beta, t_0};
  }
};

inline DimensionlessParams to_dimensionless(const ModelParams& p) {
  return DimensionlessParams{p.temp_nr() / p.temp_0(), p.t_0() / p.t_nr(), p.t_0()};
}

// ---------------------------------------------------------------------------
// key=value parameter files

/// Optional per-field overrides, as read from a config file or CLI flags.
struct ParamOverrides {
  std::optional<double> temp_nr_kelvin;
  std::optional<double> t_nr_years;
  std::optional<double> t_0_years;
  std::optional<double> temp_0_kelvin;

  /// Fields set in `other` win.
  void merge(const ParamOverrides& other) {
    if (other.temp_nr_kelvin) temp_nr_kelvin = other.temp_nr_kelvin;
    if (other.t_nr_years) t_nr_years = other.t_nr_years;
    if (other.t_0_years) t_0_years = other.t_0_years;
    if (other.temp_0_kelvin) temp_0_kelvin = other.temp_0_kelvin;
  }

  [[nodiscard]] ModelParams apply(const ModelParams& base) const {
    return ModelParams::make(Kelvin(temp_nr_kelvin.value_or(base.temp_nr().value())),
                             Years(t_nr_years.value_or(base.t_nr().value())),
                             Years(t_0_years.value_or(base.t_0().value())),
                             Kelvin(temp_0_kelvin.value_or(base.temp_0().value())));
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace detail

/// Parses a decimal or scientific-notation number; the whole token must be
/// consumed.
inline double parse_number(std::string_view text, std::string_view what) {
  text = detail::trim(text);
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ValidationError("cannot parse " + std::string(what) + " value '" + std::string(text) +
                          "'");
  }
  return v;
}

/// Reads `key=value` lines. Blank lines and lines starting with '#' are
/// skipped. Keys: temp_nr_kelvin, t_nr_years, t_0_years, temp_0_kelvin.
inline ParamOverrides read_param_config(std::istream& in) {
  ParamOverrides out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto s = detail::trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const auto key = detail::trim(s.substr(0, eq));
    const double v = parse_number(s.substr(eq + 1), key);
    if (key == "temp_nr_kelvin") {
      out.temp_nr_kelvin = v;
    } else if (key == "t_nr_years") {
      out.t_nr_years = v;
    } else if (key == "t_0_years") {
      out.t_0_years = v;
    } else if (key == "temp_0_kelvin") {
      out.temp_0_kelvin = v;
    } else {
      throw ValidationError("config line " + std::to_string(lineno) + ": unknown key '" +
                            std::string(key) + "'");
    }
  }
  return out;
}

}  // namespace egap
