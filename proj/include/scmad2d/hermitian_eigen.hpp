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

#ifndef SCMAD2D_HERMITIAN_EIGEN_HPP
#define SCMAD2D_HERMITIAN_EIGEN_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "scmad2d/errors.hpp"

namespace scmad2d {

struct HermitianEigen {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // column i pairs with values[i]
  int sweeps = 0;
};

/// Relative Hermitian defect ||Q - Q^H||_F / ||Q||_F (0 for the zero matrix).
inline double hermitian_defect(const Eigen::MatrixXcd& q) {
  const double scale = q.norm();
  if (scale == 0.0) return 0.0;
  return (q - q.adjoint()).norm() / scale;
}

/// Cyclic complex Jacobi eigensolver.
///
/// Each rotation is D*R, where D = diag(1, e^{-i arg a_pq}) makes the pivot
/// real and R is the classical real Jacobi rotation that annihilates it.
/// Sweeps stop once every off-diagonal magnitude is below 1e-12 ||Q||_F.
inline HermitianEigen hermitian_eigen(const Eigen::MatrixXcd& q, int maxSweeps = 100) {
  if (q.rows() != q.cols()) throw DimensionError("hermitian_eigen: matrix is not square");
  if (hermitian_defect(q) > 1e-10) throw DomainError("hermitian_eigen: matrix is not Hermitian");

  using cd = std::complex<double>;
  const Eigen::Index n = q.rows();
  Eigen::MatrixXcd a = 0.5 * (q + q.adjoint());
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(n, n);
  const double threshold = 1e-12 * a.norm();

  int sweep = 0;
  for (; sweep < maxSweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index r = p + 1; r < n; ++r) off = std::max(off, std::abs(a(p, r)));
    if (off <= threshold) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index r = p + 1; r < n; ++r) {
        const double mag = std::abs(a(p, r));
        if (mag == 0.0) continue;
        const cd phase = a(p, r) / mag;
        const double app = a(p, p).real();
        const double arr = a(r, r).real();
        const double theta = (arr - app) / (2.0 * mag);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        const cd upp = c;
        const cd upr = s;
        const cd urp = -s * std::conj(phase);
        const cd urr = c * std::conj(phase);

        for (Eigen::Index i = 0; i < n; ++i) {
          const cd aip = a(i, p), air = a(i, r);
          a(i, p) = aip * upp + air * urp;
          a(i, r) = aip * upr + air * urr;
          const cd vip = v(i, p), vir = v(i, r);
          v(i, p) = vip * upp + vir * urp;
          v(i, r) = vip * upr + vir * urr;
        }
        for (Eigen::Index j = 0; j < n; ++j) {
          const cd apj = a(p, j), arj = a(r, j);
          a(p, j) = std::conj(upp) * apj + std::conj(urp) * arj;
          a(r, j) = std::conj(upr) * apj + std::conj(urr) * arj;
        }
        a(p, r) = 0.0;
        a(r, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(r, r) = a(r, r).real();
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() < a(y, y).real(); });

  HermitianEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[i] = a(order[i], order[i]).real();
    out.vectors.col(i) = v.col(order[i]);
  }
  out.sweeps = sweep;
  return out;
}

/// Eigenvalues of a Hermitian matrix, nondecreasing.
inline Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& q) {
  return hermitian_eigen(q).values;
}

}  // namespace scmad2d

#endif  // SCMAD2D_HERMITIAN_EIGEN_HPP
