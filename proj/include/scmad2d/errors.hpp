// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The scmad2d Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCMAD2D_ERRORS_HPP
#define SCMAD2D_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace scmad2d {

/// Shapes or counts that do not fit together.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A scalar argument outside its admissible range (non-positive distance,
/// non-positive posynomial argument, non-Hermitian matrix, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Config file problems. Carries the offending line (0 when the error is not
/// tied to a line) and the field name when a range check failed.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& what, std::size_t line = 0, std::string field = {})
      : std::runtime_error(what), line_(line), field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

private:
  std::size_t line_;
  std::string field_;
};

/// Phase-1 certified that no strictly feasible point exists. `bestSlack` is
/// the smallest achieved max-constraint value (>= 0).
class InfeasibleProblem : public std::runtime_error {
public:
  InfeasibleProblem(const std::string& what, double bestSlack)
      : std::runtime_error(what), bestSlack_(bestSlack) {}

  double bestSlack() const noexcept { return bestSlack_; }

private:
  double bestSlack_;
};

/// The interior-point solver stopped without a certificate.
class SolverFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace scmad2d

#endif  // SCMAD2D_ERRORS_HPP
