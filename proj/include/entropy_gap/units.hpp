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

#include <compare>

namespace egap {

/// Thin strong type over a double carrying a unit tag. Only same-unit
/// arithmetic is allowed; dividing two quantities of the same unit yields a
/// plain double.
template <typename Tag>
class Quantity {
 public:
  constexpr Quantity() = default;
  constexpr explicit Quantity(double v) : value_(v) {}

  [[nodiscard]] constexpr double value() const { return value_; }

  constexpr auto operator<=>(const Quantity&) const = default;

  constexpr Quantity operator+(Quantity o) const { return Quantity(value_ + o.value_); }
  constexpr Quantity operator-(Quantity o) const { return Quantity(value_ - o.value_); }
  constexpr Quantity operator*(double s) const { return Quantity(value_ * s); }
  constexpr Quantity operator/(double s) const { return Quantity(value_ / s); }
  constexpr double operator/(Quantity o) const { return value_ / o.value_; }

  friend constexpr Quantity operator*(double s, Quantity q) { return q * s; }

 private:
  double value_ = 0.0;
};

struct KelvinTag {};
struct YearsTag {};

/// Temperature, and energy expressed as temperature (Boltzmann constant = 1).
using Kelvin = Quantity<KelvinTag>;
/// Time. The year is the only time unit in this library.
using Years = Quantity<YearsTag>;

namespace literals {
constexpr Kelvin operator""_K(long double v) { return Kelvin(static_cast<double>(v)); }
constexpr Kelvin operator""_K(unsigned long long v) { return Kelvin(static_cast<double>(v)); }
constexpr Years operator""_yr(long double v) { return Years(static_cast<double>(v)); }
constexpr Years operator""_yr(unsigned long long v) { return Years(static_cast<double>(v)); }
}  // namespace literals

}  // namespace egap
