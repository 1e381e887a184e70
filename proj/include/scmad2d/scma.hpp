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

#ifndef SCMAD2D_SCMA_HPP
#define SCMAD2D_SCMA_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "scmad2d/errors.hpp"
#include "scmad2d/random.hpp"

namespace scmad2d {

/// SCMA factor graph: the K x J indicator matrix F with f_kj = 1 when user j
/// spreads onto subcarrier k. Every user occupies the same number of
/// subcarriers (d_f = N) and every subcarrier carries the same number of
/// users (d_c = J N / K).
class FactorGraph {
public:
  explicit FactorGraph(Eigen::MatrixXi indicator) : f_(std::move(indicator)) { validate(); }

  int subcarriers() const noexcept { return static_cast<int>(f_.rows()); }
  int users() const noexcept { return static_cast<int>(f_.cols()); }
  /// d_f, the number of non-zero codeword dimensions per user.
  int user_degree() const noexcept { return static_cast<int>(f_.col(0).sum()); }
  /// d_c, the number of users colliding on each subcarrier.
  int subcarrier_degree() const noexcept { return static_cast<int>(f_.row(0).sum()); }

  bool active(int k, int j) const { return f_(k, j) != 0; }
  const Eigen::MatrixXi& indicator() const noexcept { return f_; }

  friend bool operator==(const FactorGraph& a, const FactorGraph& b) { return a.f_ == b.f_; }

private:
  void validate() const {
    if (f_.rows() < 1 || f_.cols() < 1) throw DimensionError("factor graph must be at least 1x1");
    for (Eigen::Index k = 0; k < f_.rows(); ++k)
      for (Eigen::Index j = 0; j < f_.cols(); ++j)
        if (f_(k, j) != 0 && f_(k, j) != 1)
          throw DomainError("factor graph entries must be 0 or 1");
    const int df = f_.col(0).sum();
    const int dc = f_.row(0).sum();
    if (df < 1 || dc < 1) throw DimensionError("factor graph has an empty user or subcarrier");
    for (Eigen::Index j = 0; j < f_.cols(); ++j)
      if (f_.col(j).sum() != df) throw DimensionError("factor graph column sums differ");
    for (Eigen::Index k = 0; k < f_.rows(); ++k)
      if (f_.row(k).sum() != dc) throw DimensionError("factor graph row sums differ");
  }

  Eigen::MatrixXi f_;
};

/// xi[k]: users on subcarrier k. zeta[j]: subcarriers of user j. Zero-based,
/// ascending.
struct IncidenceSets {
  std::vector<std::vector<int>> xi;
  std::vector<std::vector<int>> zeta;
};

inline IncidenceSets incidence_sets(const FactorGraph& g) {
  IncidenceSets s;
  s.xi.resize(static_cast<std::size_t>(g.subcarriers()));
  s.zeta.resize(static_cast<std::size_t>(g.users()));
  for (int j = 0; j < g.users(); ++j)
    for (int k = 0; k < g.subcarriers(); ++k)
      if (g.active(k, j)) {
        s.xi[static_cast<std::size_t>(k)].push_back(j);
        s.zeta[static_cast<std::size_t>(j)].push_back(k);
      }
  return s;
}

namespace detail {

inline double binomial(int n, int r) {
  if (r < 0 || r > n) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

// Advance `idx` (strictly increasing, values in [0, n)) to the next
// combination in lexicographic order. Returns false after the last one.
inline bool next_combination(std::vector<int>& idx, int n) {
  const int r = static_cast<int>(idx.size());
  int i = r - 1;
  while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - r + i) --i;
  if (i < 0) return false;
  ++idx[static_cast<std::size_t>(i)];
  for (int m = i + 1; m < r; ++m) idx[static_cast<std::size_t>(m)] = idx[static_cast<std::size_t>(m - 1)] + 1;
  return true;
}

}  // namespace detail

/// Regular factor graph whose columns are the first J N-subsets of the K
/// subcarriers in lexicographic order. (4, 6, 2) gives the basic 150%
/// overloaded SCMA pattern.
inline FactorGraph build_factor_graph(int K, int J, int N) {
  if (K < 1 || J < 1 || N < 1) throw DimensionError("K, J and N must be positive");
  if (N > K) throw DimensionError("N must not exceed K");
  if ((J * N) % K != 0) throw DimensionError("J*N must be divisible by K");
  if (detail::binomial(K, N) < J) throw DimensionError("binomial(K, N) < J: not enough distinct columns");

  Eigen::MatrixXi f = Eigen::MatrixXi::Zero(K, J);
  std::vector<int> idx(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (int j = 0; j < J; ++j) {
    for (int k : idx) f(k, j) = 1;
    detail::next_combination(idx, K);
  }
  for (int k = 0; k < K; ++k)
    if (f.row(k).sum() != J * N / K)
      throw DimensionError("lexicographic column choice does not give equal row sums for these dimensions");
  return FactorGraph(std::move(f));
}

/// Plain-text form: one row of 0/1 per line, separated by spaces.
inline void write_factor_graph(std::ostream& os, const FactorGraph& g) {
  const auto& f = g.indicator();
  for (Eigen::Index k = 0; k < f.rows(); ++k) {
    for (Eigen::Index j = 0; j < f.cols(); ++j) os << (j ? " " : "") << f(k, j);
    os << '\n';
  }
}

inline FactorGraph read_factor_graph(std::istream& is) {
  std::vector<std::vector<int>> rows;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::vector<int> row;
    std::string tok;
    while (ls >> tok) {
      if (tok != "0" && tok != "1") throw DomainError("factor graph entries must be 0 or 1, got '" + tok + "'");
      row.push_back(tok == "1");
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DimensionError("empty factor graph");
  Eigen::MatrixXi f(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].size() != rows.front().size()) throw DimensionError("ragged factor graph rows");
    for (std::size_t j = 0; j < rows[k].size(); ++j)
      f(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = rows[k][j];
  }
  return FactorGraph(std::move(f));
}

/// Structural codebook description of every user.
///
/// The codeword of user j is x_j = e^{i theta_j} V_j M' u_j with
/// M' = (E_r + i E_i) M, and u_j ~ CN(0, diag(qamCovariance[j])).
struct CodebookSkeleton {
  std::vector<Eigen::MatrixXd> selector;  // per user, K x N, one 1 per column
  Eigen::MatrixXcd rotation;              // M', N x 2N
  std::vector<double> phase;              // theta_j
  std::vector<Eigen::VectorXd> qamCovariance;  // per user, 2N entries >= 0

  int users() const noexcept { return static_cast<int>(selector.size()); }
};

/// K x N selectors mapping each user's N non-zero dimensions onto zeta_j.
inline std::vector<Eigen::MatrixXd> build_selectors(const FactorGraph& g) {
  const auto sets = incidence_sets(g);
  const int N = g.user_degree();
  std::vector<Eigen::MatrixXd> out;
  for (const auto& zeta : sets.zeta) {
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(g.subcarriers(), N);
    for (int n = 0; n < N; ++n) v(zeta[static_cast<std::size_t>(n)], n) = 1.0;
    out.push_back(std::move(v));
  }
  return out;
}

/// (E_r + i E_i) M for a 2N x 2N unitary M: the first N rows of M plus i times
/// the last N rows.
inline Eigen::MatrixXcd compose_rotation(const Eigen::MatrixXcd& unitary) {
  const Eigen::Index n2 = unitary.rows();
  if (n2 % 2 != 0 || unitary.cols() != n2) throw DimensionError("rotation must be 2N x 2N");
  const Eigen::Index n = n2 / 2;
  return unitary.topRows(n) + std::complex<double>(0.0, 1.0) * unitary.bottomRows(n);
}

/// Unitary 2N-point DFT matrix.
inline Eigen::MatrixXcd unitary_dft(int size) {
  Eigen::MatrixXcd m(size, size);
  for (int a = 0; a < size; ++a)
    for (int b = 0; b < size; ++b)
      m(a, b) = std::polar(1.0 / std::sqrt(static_cast<double>(size)),
                           -2.0 * std::numbers::pi * a * b / size);
  return m;
}

/// Deterministic skeleton: DFT rotation, theta_j = 2 pi j / J (zero-based j),
/// and every QAM component at `qamPower`.
inline CodebookSkeleton default_skeleton(const FactorGraph& g, double qamPower = 1.0) {
  const int N = g.user_degree();
  CodebookSkeleton s;
  s.selector = build_selectors(g);
  s.rotation = compose_rotation(unitary_dft(2 * N));
  for (int j = 0; j < g.users(); ++j) {
    s.phase.push_back(2.0 * std::numbers::pi * j / g.users());
    s.qamCovariance.push_back(Eigen::VectorXd::Constant(2 * N, qamPower));
  }
  return s;
}

/// Random skeleton for bound studies: Haar-like unitary from the QR of a
/// complex Gaussian matrix, uniform phases, and QAM powers uniform on
/// (0, maxQamPower].
template <typename Rng = RandomStream>
CodebookSkeleton random_skeleton(const FactorGraph& g, Rng& rng, double maxQamPower = 1.0) {
  const int N = g.user_degree();
  Eigen::MatrixXcd z(2 * N, 2 * N);
  for (int a = 0; a < 2 * N; ++a)
    for (int b = 0; b < 2 * N; ++b) z(a, b) = rng.complex_gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(2 * N, 2 * N);

  CodebookSkeleton s;
  s.selector = build_selectors(g);
  s.rotation = compose_rotation(q);
  for (int j = 0; j < g.users(); ++j) {
    s.phase.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
    Eigen::VectorXd p(2 * N);
    for (int n = 0; n < 2 * N; ++n) p[n] = maxQamPower * rng.uniform_open_closed();
    s.qamCovariance.push_back(std::move(p));
  }
  return s;
}

namespace detail {

inline void check_skeleton_user(const CodebookSkeleton& skel, int user) {
  if (user < 0 || user >= skel.users()) throw DimensionError("skeleton user index out of range");
  const auto& v = skel.selector[static_cast<std::size_t>(user)];
  const Eigen::Index N = v.cols();
  if (skel.rotation.rows() != N || skel.rotation.cols() != 2 * N)
    throw DimensionError("rotation must be N x 2N");
  if (skel.qamCovariance[static_cast<std::size_t>(user)].size() != 2 * N)
    throw DimensionError("qamCovariance must have 2N entries");
  if ((skel.qamCovariance[static_cast<std::size_t>(user)].array() < 0.0).any())
    throw DomainError("qamCovariance entries must be non-negative");
}

}  // namespace detail

/// The two K x K split terms M_j1 A_j1 M_j1^H and M_j2 A_j2 M_j2^H whose sum is
/// the codeword covariance of `user`.
inline std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> covariance_split_terms(const CodebookSkeleton& skel,
                                                                            int user) {
  detail::check_skeleton_user(skel, user);
  const auto& v = skel.selector[static_cast<std::size_t>(user)];
  const auto& p = skel.qamCovariance[static_cast<std::size_t>(user)];
  const Eigen::Index N = v.cols();
  const Eigen::MatrixXcd vm = v.cast<std::complex<double>>() * skel.rotation;  // K x 2N
  const Eigen::MatrixXcd m1 = vm.leftCols(N);
  const Eigen::MatrixXcd m2 = vm.rightCols(N);
  Eigen::MatrixXcd t1 = m1 * p.head(N).cast<std::complex<double>>().asDiagonal() * m1.adjoint();
  Eigen::MatrixXcd t2 = m2 * p.tail(N).cast<std::complex<double>>().asDiagonal() * m2.adjoint();
  return {std::move(t1), std::move(t2)};
}

/// Codeword covariance K_{x_j} (K x K, Hermitian PSD, zero outside
/// zeta_j x zeta_j). The phase rotation cancels.
inline Eigen::MatrixXcd build_covariance(const CodebookSkeleton& skel, int user) {
  auto [t1, t2] = covariance_split_terms(skel, user);
  Eigen::MatrixXcd k = t1 + t2;
  return 0.5 * (k + k.adjoint());
}

}  // namespace scmad2d

#endif  // SCMAD2D_SCMA_HPP
