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

#ifndef SCMAD2D_CONVEX_FORM_HPP
#define SCMAD2D_CONVEX_FORM_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "scmad2d/errors.hpp"

namespace scmad2d {

/// f(y) = log sum_m exp(a_m^T y + b_m); row m of `A` is a_m.
struct LogSumExp {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  Eigen::Index terms() const noexcept { return A.rows(); }
  Eigen::Index variables() const noexcept { return A.cols(); }

  /// Max-shifted evaluation; exact for exponents far outside the double range.
  double value(const Eigen::VectorXd& y) const {
    const Eigen::VectorXd z = A * y + b;
    const double m = z.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((z.array() - m).exp().sum());
  }

  /// Value, gradient A^T w and Hessian A^T (diag(w) - w w^T) A, where w is the
  /// softmax of A y + b.
  double derivatives(const Eigen::VectorXd& y, Eigen::VectorXd& grad, Eigen::MatrixXd* hess = nullptr) const {
    const Eigen::VectorXd z = A * y + b;
    const double m = z.maxCoeff();
    Eigen::VectorXd w = (z.array() - m).exp();
    const double s = w.sum();
    w /= s;
    grad = A.transpose() * w;
    if (hess) *hess = A.transpose() * w.asDiagonal() * A - grad * grad.transpose();
    return m + std::log(s);
  }
};

/// a^T y + b = 0.
struct AffineEquality {
  Eigen::VectorXd a;
  double b = 0.0;
};

/// A geometric program in convex (log-variable) form:
///   minimize   objective(y)
///   subject to inequalities[i](y) <= 0,  equalities[t](y) = 0.
struct ConvexFormProblem {
  int numVariables = 0;
  LogSumExp objective;
  std::vector<LogSumExp> inequalities;
  std::vector<AffineEquality> equalities;

  void check() const {
    auto fits = [&](const LogSumExp& f) {
      return f.A.cols() == numVariables && f.A.rows() == f.b.size() && f.A.rows() > 0;
    };
    if (!fits(objective)) throw DimensionError("objective does not match the variable count");
    for (const auto& g : inequalities)
      if (!fits(g)) throw DimensionError("inequality does not match the variable count");
    for (const auto& h : equalities)
      if (h.a.size() != numVariables) throw DimensionError("equality does not match the variable count");
  }

  /// max_i inequalities[i](y); -inf without inequalities.
  double max_constraint(const Eigen::VectorXd& y) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& g : inequalities) worst = std::max(worst, g.value(y));
    return worst;
  }
};

}  // namespace scmad2d

#endif  // SCMAD2D_CONVEX_FORM_HPP
