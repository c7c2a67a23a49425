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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace egap {

/// Bad input: out-of-range parameters, malformed specs, t <= 0, etc.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a model function (t <= 0, T <= 0).
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// The nuclear energy scale must exceed the background temperature.
class WienLimitError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// An iterative method failed to converge or produced an unusable value.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state assembled from a base and a perturbation has a negative entry.
class NonPhysicalState : public ValidationError {
 public:
  NonPhysicalState(const std::string& what, std::size_t worst_index, double max_amplitude)
      : ValidationError(what), worst_index_(worst_index), max_amplitude_(max_amplitude) {}

  [[nodiscard]] std::size_t worst_index() const { return worst_index_; }
  /// Largest amplitude that keeps every entry non-negative at the same t.
  [[nodiscard]] double max_amplitude() const { return max_amplitude_; }

 private:
  std::size_t worst_index_;
  double max_amplitude_;
};

/// The state puts weight where the reference has none; the relative
/// entropy diverges.
class SupportViolation : public std::domain_error {
 public:
  SupportViolation(const std::string& what, std::size_t index)
      : std::domain_error(what), index_(index) {}

  [[nodiscard]] std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Every black-body weight underflowed to zero.
class DegenerateState : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

/// The Gaussian bump is too narrow to land on any grid point.
class EmptyPeak : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// The peaked Boltzmann form needs omega_1 / T well above 1.
class WienRegimeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace egap
