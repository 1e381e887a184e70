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

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "scmad2d/hermitian_eigen.hpp"
#include "scmad2d/random.hpp"

using namespace scmad2d;

namespace {

Eigen::MatrixXcd random_hermitian(RandomStream& rng, int n) {
  Eigen::MatrixXcd g(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) g(a, b) = rng.complex_gaussian();
  return 0.5 * (g + g.adjoint());
}

}  // namespace

TEST(HermitianEigen, Identity) {
  const Eigen::VectorXd v = hermitian_eigenvalues(Eigen::MatrixXcd::Identity(3, 3));
  EXPECT_EQ(v, Eigen::Vector3d(1, 1, 1));
}

TEST(HermitianEigen, DiagonalIsSorted) {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  d(2, 2) = 2.0;
  EXPECT_EQ(hermitian_eigenvalues(d), Eigen::Vector3d(1, 2, 3));
}

TEST(HermitianEigen, TraceAndResidual) {
  RandomStream rng(6);
  const Eigen::MatrixXcd q = random_hermitian(rng, 6);
  const auto e = hermitian_eigen(q);
  EXPECT_NEAR(e.values.sum(), q.trace().real(), 1e-9);
  EXPECT_LE((q * e.vectors - e.vectors * e.values.cast<std::complex<double>>().asDiagonal()).norm(), 1e-8 * q.norm());
  EXPECT_LE((e.vectors.adjoint() * e.vectors - Eigen::MatrixXcd::Identity(6, 6)).norm(), 1e-10);
  for (int i = 1; i < 6; ++i) EXPECT_LE(e.values[i - 1], e.values[i]);
}

TEST(HermitianEigen, AgreesWithLapackStyleSolver) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    RandomStream rng(seed);
    const int n = 1 + static_cast<int>(seed % 8);
    const Eigen::MatrixXcd q = random_hermitian(rng, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ref(q);
    const Eigen::VectorXd mine = hermitian_eigenvalues(q);
    EXPECT_LE((mine - ref.eigenvalues()).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, q.norm())) << "seed " << seed;
  }
}

TEST(HermitianEigen, RejectsNonHermitian) {
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(2, 2);
  q(0, 1) = std::complex<double>(0.0, 1.0);
  q(1, 0) = std::complex<double>(0.0, 1.0);
  EXPECT_THROW(hermitian_eigenvalues(q), DomainError);
  EXPECT_THROW(hermitian_eigenvalues(Eigen::MatrixXcd::Zero(2, 3)), DimensionError);
}

TEST(HermitianEigen, ZeroMatrix) {
  EXPECT_EQ(hermitian_eigenvalues(Eigen::MatrixXcd::Zero(4, 4)), Eigen::VectorXd::Zero(4));
}

// Weyl: lambda_k(A) + lambda_1(B) <= lambda_k(A+B) <= lambda_k(A) + lambda_K(B).
TEST(HermitianEigen, WeylInequalitiesHold) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    RandomStream rng(seed, Stream::skeleton);
    const int n = 4;
    const Eigen::MatrixXcd a = random_hermitian(rng, n);
    const Eigen::MatrixXcd b = random_hermitian(rng, n);
    const Eigen::VectorXd la = hermitian_eigenvalues(a);
    const Eigen::VectorXd lb = hermitian_eigenvalues(b);
    const Eigen::VectorXd lab = hermitian_eigenvalues(a + b);
    for (int k = 0; k < n; ++k) {
      EXPECT_LE(la[k] + lb[0], lab[k] + 1e-9);
      EXPECT_LE(lab[k], la[k] + lb[n - 1] + 1e-9);
    }
  }
}
