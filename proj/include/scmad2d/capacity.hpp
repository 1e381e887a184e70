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

#ifndef SCMAD2D_CAPACITY_HPP
#define SCMAD2D_CAPACITY_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "scmad2d/channel.hpp"
#include "scmad2d/errors.hpp"
#include "scmad2d/hermitian_eigen.hpp"
#include "scmad2d/scma.hpp"

namespace scmad2d {

/// Which subcarrier each D2D pair reuses. pairSubcarrier[l] = k.
struct Occupancy {
  std::vector<int> pairSubcarrier;

  /// Pair l on subcarrier l.
  static Occupancy identity(int pairs) {
    Occupancy o;
    for (int l = 0; l < pairs; ++l) o.pairSubcarrier.push_back(l);
    return o;
  }

  int pairs() const noexcept { return static_cast<int>(pairSubcarrier.size()); }

  /// Inverse map; throws DomainError on a shared subcarrier or an index
  /// outside [0, K).
  std::vector<std::optional<int>> pair_on_subcarrier(int K) const {
    std::vector<std::optional<int>> out(static_cast<std::size_t>(K));
    for (int l = 0; l < pairs(); ++l) {
      const int k = pairSubcarrier[static_cast<std::size_t>(l)];
      if (k < 0 || k >= K) throw DomainError("occupancy: subcarrier index out of range");
      if (out[static_cast<std::size_t>(k)]) throw DomainError("occupancy: two D2D pairs on one subcarrier");
      out[static_cast<std::size_t>(k)] = l;
    }
    return out;
  }
};

/// Cellular powers P_jk (J x K, zero off the factor graph) and D2D powers P'_l.
struct PowerAllocation {
  Eigen::MatrixXd cellular;
  Eigen::VectorXd d2d;

  static PowerAllocation zeros(int J, int K, int pairs) {
    return {Eigen::MatrixXd::Zero(J, K), Eigen::VectorXd::Zero(pairs)};
  }

  /// Throws unless every entry is finite and non-negative and P_jk = 0
  /// wherever f_kj = 0.
  void check(const FactorGraph& g) const {
    if (cellular.rows() != g.users() || cellular.cols() != g.subcarriers())
      throw DimensionError("allocation does not match factor graph");
    for (int j = 0; j < g.users(); ++j)
      for (int k = 0; k < g.subcarriers(); ++k) {
        const double p = cellular(j, k);
        if (!std::isfinite(p) || p < 0.0) throw DomainError("cellular power must be finite and non-negative");
        if (!g.active(k, j) && p != 0.0) throw DomainError("cellular power outside the factor graph support");
      }
    for (Eigen::Index l = 0; l < d2d.size(); ++l)
      if (!std::isfinite(d2d[l]) || d2d[l] < 0.0) throw DomainError("D2D power must be finite and non-negative");
  }
};

/// Per-subcarrier noise-plus-D2D-interference at the base station,
/// Ntilde_k = N_0 + |h^db_l|^2 P'_l on subcarriers reused by pair l.
struct EquivalentNoise {
  Eigen::VectorXd perSubcarrier;
};

inline EquivalentNoise equivalent_noise(const ChannelRealization& ch, const PowerAllocation& alloc,
                                        const Occupancy& occ) {
  if (occ.pairs() != ch.pairs() || alloc.d2d.size() != ch.pairs())
    throw DimensionError("equivalent_noise: pair count mismatch");
  const auto onK = occ.pair_on_subcarrier(ch.subcarriers());
  EquivalentNoise n{Eigen::VectorXd::Constant(ch.subcarriers(), ch.noisePowerW)};
  for (int k = 0; k < ch.subcarriers(); ++k)
    if (const auto l = onK[static_cast<std::size_t>(k)])
      n.perSubcarrier[k] += std::norm(ch.d2dToBs[*l]) * alloc.d2d[*l];
  return n;
}

/// A user's codeword covariance given as the two split terms whose sum is
/// K_{x_j}. Diagonal covariances put everything in `first`.
struct CovarianceSplit {
  Eigen::MatrixXcd first;
  Eigen::MatrixXcd second;

  Eigen::MatrixXcd total() const { return first + second; }
};

inline std::vector<CovarianceSplit> skeleton_covariances(const CodebookSkeleton& skel) {
  std::vector<CovarianceSplit> out;
  for (int j = 0; j < skel.users(); ++j) {
    auto [a, b] = covariance_split_terms(skel, j);
    out.push_back({std::move(a), std::move(b)});
  }
  return out;
}

/// K_{x_j} = diag(P_j1, ..., P_jK).
inline std::vector<CovarianceSplit> diagonal_covariances(const PowerAllocation& alloc) {
  std::vector<CovarianceSplit> out;
  const Eigen::Index K = alloc.cellular.cols();
  for (Eigen::Index j = 0; j < alloc.cellular.rows(); ++j) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(K, K);
    for (Eigen::Index k = 0; k < K; ++k) d(k, k) = alloc.cellular(j, k);
    out.push_back({std::move(d), Eigen::MatrixXcd::Zero(K, K)});
  }
  return out;
}

namespace detail {

inline void check_covariances(const ChannelRealization& ch, const std::vector<CovarianceSplit>& cov,
                              const EquivalentNoise& noise) {
  const int K = ch.subcarriers();
  if (static_cast<int>(cov.size()) != ch.users()) throw DimensionError("one covariance per user required");
  if (noise.perSubcarrier.size() != K) throw DimensionError("noise length must equal K");
  for (const auto& c : cov)
    if (c.first.rows() != K || c.first.cols() != K || c.second.rows() != K || c.second.cols() != K)
      throw DimensionError("covariances must be K x K");
}

inline Eigen::VectorXd sorted(Eigen::VectorXd v) {
  std::sort(v.data(), v.data() + v.size());
  return v;
}

}  // namespace detail

/// K_y = K_ntilde + sum_j H_j K_{x_j} H_j^H with H_j = diag(h^cb_j).
inline Eigen::MatrixXcd output_covariance(const ChannelRealization& ch, const std::vector<CovarianceSplit>& cov,
                                          const EquivalentNoise& noise) {
  detail::check_covariances(ch, cov, noise);
  const int K = ch.subcarriers();
  Eigen::MatrixXcd ky = noise.perSubcarrier.cast<std::complex<double>>().asDiagonal();
  for (int j = 0; j < ch.users(); ++j) {
    const Eigen::VectorXcd h = ch.cellToBs.row(j).transpose();
    const Eigen::MatrixXcd kx = cov[static_cast<std::size_t>(j)].total();
    for (int a = 0; a < K; ++a)
      for (int b = 0; b < K; ++b) ky(a, b) += h[a] * kx(a, b) * std::conj(h[b]);
  }
  return 0.5 * (ky + ky.adjoint());
}

/// log2 det(K_y) - sum_k log2 Ntilde_k, via the eigenvalues of K_y.
inline double exact_cellular_capacity_general(const ChannelRealization& ch, const std::vector<CovarianceSplit>& cov,
                                              const EquivalentNoise& noise) {
  for (const auto& c : cov)
    if (hermitian_defect(c.total()) > 1e-10) throw DomainError("covariance is not Hermitian");
  const Eigen::VectorXd lambda = hermitian_eigenvalues(output_covariance(ch, cov, noise));
  double bits = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (!(lambda[k] > 0.0)) throw DomainError("output covariance is singular");
    bits += std::log2(lambda[k]) - std::log2(noise.perSubcarrier[k]);
  }
  return std::max(bits, 0.0);
}

/// Per-user spectral extremes of the split terms:
/// tauMax_j = lambda_K(T1) + lambda_K(T2), tauMin_j = lambda_1(T1) + lambda_1(T2).
struct SplitSpectrum {
  std::vector<double> tauMax;
  std::vector<double> tauMin;
};

inline SplitSpectrum split_spectrum(const std::vector<CovarianceSplit>& cov) {
  SplitSpectrum s;
  for (const auto& c : cov) {
    const Eigen::VectorXd a = hermitian_eigenvalues(c.first);
    const Eigen::VectorXd b = hermitian_eigenvalues(c.second);
    s.tauMax.push_back(a[a.size() - 1] + b[b.size() - 1]);
    s.tauMin.push_back(a[0] + b[0]);
  }
  return s;
}

namespace detail {

inline double signal_ceiling(const ChannelRealization& ch, const SplitSpectrum& s) {
  double x = 0.0;
  for (int j = 0; j < ch.users(); ++j) x += s.tauMax[static_cast<std::size_t>(j)] * ch.cellToBs.row(j).cwiseAbs2().maxCoeff();
  return x;
}

inline double signal_floor(const ChannelRealization& ch, const SplitSpectrum& s) {
  double x = 0.0;
  for (int j = 0; j < ch.users(); ++j) x += s.tauMin[static_cast<std::size_t>(j)] * ch.cellToBs.row(j).cwiseAbs2().minCoeff();
  return x;
}

}  // namespace detail

/// Upper bound on each eigenvalue of K_y, indexed in nondecreasing order:
/// Ntilde_(k) + sum_j tauMax_j max_k |h^cb_jk|^2, where Ntilde_(k) is the k-th
/// smallest equivalent noise (the k-th eigenvalue of the diagonal K_ntilde).
inline Eigen::VectorXd eigenvalue_upper_bounds(const ChannelRealization& ch, const std::vector<CovarianceSplit>& cov,
                                               const EquivalentNoise& noise) {
  detail::check_covariances(ch, cov, noise);
  const double x = detail::signal_ceiling(ch, split_spectrum(cov));
  return (detail::sorted(noise.perSubcarrier).array() + x).matrix();
}

/// Lower counterpart: Ntilde_(k) + sum_j tauMin_j min_k |h^cb_jk|^2.
inline Eigen::VectorXd eigenvalue_lower_bounds(const ChannelRealization& ch, const std::vector<CovarianceSplit>& cov,
                                               const EquivalentNoise& noise) {
  detail::check_covariances(ch, cov, noise);
  const double x = detail::signal_floor(ch, split_spectrum(cov));
  return (detail::sorted(noise.perSubcarrier).array() + x).matrix();
}

/// sum_k log2(1 + [sum_j tauMax_j max_k |h^cb_jk|^2] / Ntilde_k).
inline double capacity_upper_bound(const ChannelRealization& ch, const std::vector<CovarianceSplit>& cov,
                                   const EquivalentNoise& noise) {
  detail::check_covariances(ch, cov, noise);
  const double x = detail::signal_ceiling(ch, split_spectrum(cov));
  double bits = 0.0;
  for (Eigen::Index k = 0; k < noise.perSubcarrier.size(); ++k) bits += std::log2(1.0 + x / noise.perSubcarrier[k]);
  return bits;
}

struct EigenvalueBracket {
  double lambda;
  double upper;
  double lower;
};

struct CapacityBoundReport {
  double exact = 0.0;
  double upper = 0.0;
  double lower = 0.0;
  std::vector<EigenvalueBracket> perEigenvalue;
};

inline CapacityBoundReport capacity_bound_report(const ChannelRealization& ch, const std::vector<CovarianceSplit>& cov,
                                                 const EquivalentNoise& noise) {
  CapacityBoundReport r;
  const Eigen::VectorXd lambda = hermitian_eigenvalues(output_covariance(ch, cov, noise));
  const Eigen::VectorXd up = eigenvalue_upper_bounds(ch, cov, noise);
  const Eigen::VectorXd lo = eigenvalue_lower_bounds(ch, cov, noise);
  r.exact = exact_cellular_capacity_general(ch, cov, noise);
  r.upper = capacity_upper_bound(ch, cov, noise);
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    r.perEigenvalue.push_back({lambda[k], up[k], lo[k]});
    r.lower += std::log2(lo[k]) - std::log2(noise.perSubcarrier[k]);
  }
  return r;
}

/// CSV rows: k,lambda,lower,upper.
inline void write_bound_report_csv(std::ostream& os, const CapacityBoundReport& r) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  os << "k,lambda,lower,upper\n";
  for (std::size_t k = 0; k < r.perEigenvalue.size(); ++k)
    os << k << ',' << r.perEigenvalue[k].lambda << ',' << r.perEigenvalue[k].lower << ','
       << r.perEigenvalue[k].upper << '\n';
  os.precision(old);
}

/// Diagonal-covariance capacity:
///   sum_k log2(1 + sum_{j in xi_k} |h^cb_jk|^2 P_jk / Ntilde_k).
inline double closed_form_cellular_capacity(const ChannelRealization& ch, const PowerAllocation& alloc,
                                            const EquivalentNoise& noise, const FactorGraph& g) {
  alloc.check(g);
  const auto sets = incidence_sets(g);
  double bits = 0.0;
  for (int k = 0; k < g.subcarriers(); ++k) {
    double signal = 0.0;
    for (int j : sets.xi[static_cast<std::size_t>(k)]) signal += std::norm(ch.cellToBs(j, k)) * alloc.cellular(j, k);
    bits += std::log2(1.0 + signal / noise.perSubcarrier[k]);
  }
  return bits;
}

/// gamma^c_jk = |h^cb_jk|^2 P_jk / Ntilde_k for k in zeta_j.
inline double cellular_sinr(const ChannelRealization& ch, const PowerAllocation& alloc, const EquivalentNoise& noise,
                            const FactorGraph& g, int j, int k) {
  if (j < 0 || j >= g.users() || k < 0 || k >= g.subcarriers()) throw DimensionError("cellular_sinr: index out of range");
  if (!g.active(k, j)) throw DomainError("cellular_sinr: subcarrier not used by this user");
  return std::norm(ch.cellToBs(j, k)) * alloc.cellular(j, k) / noise.perSubcarrier[k];
}

/// Interference-plus-noise at D2D receiver l:
/// N_0 + sum_{j in xi_k(l)} |h^cd_jl|^2 P_{j,k(l)}.
inline double d2d_interference_plus_noise(const ChannelRealization& ch, const PowerAllocation& alloc,
                                          const FactorGraph& g, int l, const Occupancy& occ) {
  if (l < 0 || l >= occ.pairs() || l >= ch.pairs()) throw DomainError("d2d_sinr: pair has no assigned subcarrier");
  occ.pair_on_subcarrier(g.subcarriers());
  const int k = occ.pairSubcarrier[static_cast<std::size_t>(l)];
  double in = ch.noisePowerW;
  for (int j = 0; j < g.users(); ++j)
    if (g.active(k, j)) in += std::norm(ch.cellToD2d(j, l)) * alloc.cellular(j, k);
  return in;
}

inline double d2d_sinr(const ChannelRealization& ch, const PowerAllocation& alloc, const FactorGraph& g, int l,
                       const Occupancy& occ) {
  const double in = d2d_interference_plus_noise(ch, alloc, g, l, occ);
  return std::norm(ch.d2dPair[l]) * alloc.d2d[l] / in;
}

inline double d2d_capacity(const ChannelRealization& ch, const PowerAllocation& alloc, const FactorGraph& g,
                           const Occupancy& occ) {
  double bits = 0.0;
  for (int l = 0; l < occ.pairs(); ++l) bits += std::log2(1.0 + d2d_sinr(ch, alloc, g, l, occ));
  return bits;
}

}  // namespace scmad2d

#endif  // SCMAD2D_CAPACITY_HPP
