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

#ifndef SCMAD2D_CHANNEL_HPP
#define SCMAD2D_CHANNEL_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "scmad2d/errors.hpp"
#include "scmad2d/random.hpp"

namespace scmad2d {

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Scenario parameters in the units of the simulation table (dB / dBm).
/// Defaults are the basic J=6, K=4, N=2 setup with a single D2D pair.
struct ScenarioConfig {
  int J = 6;
  int K = 4;
  int N = 2;
  int J_D = 1;
  double noiseDbmPerHz = -174.0;
  double bandwidthHz = 180e3;
  double cellularPowerCapDbm = 30.0;
  double d2dPowerCapDbm = 30.0;
  double cellularSinrFloorDb = 0.0;
  double d2dSinrFloorDb = 10.0;
  double cellRadiusM = 500.0;
  std::pair<double, double> d2dDistanceRangeM{1.0, 20.0};
  std::uint64_t seed = 1;

  /// N_0 B: total noise power on one subcarrier, in watts.
  double noise_power_w() const { return dbm_to_watts(noiseDbmPerHz) * bandwidthHz; }
  double cellular_cap_w() const { return dbm_to_watts(cellularPowerCapDbm); }
  double d2d_cap_w() const { return dbm_to_watts(d2dPowerCapDbm); }
  double cellular_sinr_floor() const { return db_to_linear(cellularSinrFloorDb); }
  double d2d_sinr_floor() const { return db_to_linear(d2dSinrFloorDb); }

  /// Throws ConfigError naming the first field out of range.
  void validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
      throw ConfigError("invalid " + field + ": " + why, 0, field);
    };
    if (J < 1) fail("J", "must be >= 1");
    if (K < 1) fail("K", "must be >= 1");
    if (N < 1) fail("N", "must be >= 1");
    if (N > K) fail("N", "must not exceed K");
    if (J_D < 0) fail("J_D", "must be >= 0");
    if (J_D > K) fail("J_D", "must not exceed K (one D2D pair per subcarrier)");
    if (!std::isfinite(noiseDbmPerHz)) fail("noiseDbmPerHz", "must be finite");
    if (!(bandwidthHz > 0.0) || !std::isfinite(bandwidthHz)) fail("bandwidthHz", "must be positive");
    if (!std::isfinite(cellularPowerCapDbm)) fail("cellularPowerCapDbm", "must be finite");
    if (!std::isfinite(d2dPowerCapDbm)) fail("d2dPowerCapDbm", "must be finite");
    if (!std::isfinite(cellularSinrFloorDb)) fail("cellularSinrFloorDb", "must be finite");
    if (!std::isfinite(d2dSinrFloorDb)) fail("d2dSinrFloorDb", "must be finite");
    if (!(cellRadiusM > 0.0) || !std::isfinite(cellRadiusM)) fail("cellRadiusM", "must be positive");
    if (!(d2dDistanceRangeM.first >= 1.0)) fail("d2dDistanceRangeM", "minimum must be >= 1 m");
    if (!(d2dDistanceRangeM.second >= d2dDistanceRangeM.first) || !std::isfinite(d2dDistanceRangeM.second))
      fail("d2dDistanceRangeM", "maximum must be finite and >= minimum");
    if (!(cellular_cap_w() > 0.0)) fail("cellularPowerCapDbm", "linear cap must be positive");
    if (!(d2d_cap_w() > 0.0)) fail("d2dPowerCapDbm", "linear cap must be positive");
  }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

enum class LinkKind { cellular, d2d };

/// Distance-dependent path loss in dB:
///   cellular  37.6 log10(d[km]) + 128.1
///   d2d       40   log10(d[km]) + 148
inline double path_loss_db(LinkKind kind, double distanceM) {
  if (!(distanceM > 0.0)) throw DomainError("path_loss_db: distance must be positive");
  const double km = distanceM / 1000.0;
  return kind == LinkKind::cellular ? 37.6 * std::log10(km) + 128.1 : 40.0 * std::log10(km) + 148.0;
}

/// Node positions in meters; the base station sits at the origin.
struct NodeGeometry {
  std::vector<Eigen::Vector2d> cellUserPositions;
  std::vector<Eigen::Vector2d> d2dTxPositions;
  std::vector<Eigen::Vector2d> d2dRxPositions;
};

namespace detail {

template <typename Rng>
Eigen::Vector2d uniform_in_annulus(Rng& rng, double rMin, double rMax) {
  const double r = std::sqrt(rMin * rMin + rng.uniform() * (rMax * rMax - rMin * rMin));
  const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace detail

/// Cellular users and D2D transmitters uniform (by area) in the cell disk;
/// each D2D receiver uniform on the annulus of admissible pair distances
/// around its transmitter. Pairs are drawn after all cellular users, one at a
/// time, so the first pairs of a larger J_D match a smaller J_D exactly.
template <typename Rng = RandomStream>
NodeGeometry sample_geometry(const ScenarioConfig& cfg, Rng& rng) {
  cfg.validate();
  NodeGeometry geo;
  for (int j = 0; j < cfg.J; ++j) geo.cellUserPositions.push_back(detail::uniform_in_annulus(rng, 0.0, cfg.cellRadiusM));
  for (int l = 0; l < cfg.J_D; ++l) {
    const Eigen::Vector2d tx = detail::uniform_in_annulus(rng, 0.0, cfg.cellRadiusM);
    const Eigen::Vector2d offset =
        detail::uniform_in_annulus(rng, cfg.d2dDistanceRangeM.first, cfg.d2dDistanceRangeM.second);
    geo.d2dTxPositions.push_back(tx);
    geo.d2dRxPositions.push_back(tx + offset);
  }
  return geo;
}

/// Complex gains of every link for one realization.
struct ChannelRealization {
  Eigen::MatrixXcd cellToBs;   // J x K, h^cb_jk
  Eigen::VectorXcd d2dToBs;    // J_D,   h^db_l
  Eigen::VectorXcd d2dPair;    // J_D,   h^dd_l
  Eigen::MatrixXcd cellToD2d;  // J x J_D, h^cd_jl
  double noisePowerW = 0.0;    // N_0 per subcarrier

  int users() const noexcept { return static_cast<int>(cellToBs.rows()); }
  int subcarriers() const noexcept { return static_cast<int>(cellToBs.cols()); }
  int pairs() const noexcept { return static_cast<int>(d2dPair.size()); }

  friend bool operator==(const ChannelRealization& a, const ChannelRealization& b) {
    return a.cellToBs == b.cellToBs && a.d2dToBs == b.d2dToBs && a.d2dPair == b.d2dPair &&
           a.cellToD2d == b.cellToD2d && a.noisePowerW == b.noisePowerW;
  }
};

enum class FadingMode {
  rayleigh,
  unit,  // g = 1: gains are the bare path loss
};

/// Path-loss distances are floored at 1 m so the far-field models stay below
/// unit gain.
inline constexpr double kMinLinkDistanceM = 1.0;

/// h = g * sqrt(10^(-PL/10)). Links ending at the base station (h^cb, h^db)
/// use the cellular model; device-to-device links (h^dd, h^cd) use the D2D
/// model. Draw order: h^cb row-major, then per pair (h^db, h^dd, h^cd column).
template <typename Rng = RandomStream>
ChannelRealization sample_channels(const ScenarioConfig& cfg, const NodeGeometry& geo, Rng& rng,
                                   FadingMode fading = FadingMode::rayleigh) {
  cfg.validate();
  if (static_cast<int>(geo.cellUserPositions.size()) != cfg.J ||
      static_cast<int>(geo.d2dTxPositions.size()) != cfg.J_D ||
      static_cast<int>(geo.d2dRxPositions.size()) != cfg.J_D)
    throw DimensionError("geometry does not match scenario");

  auto gain = [&](LinkKind kind, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    const double d = std::max((a - b).norm(), kMinLinkDistanceM);
    const double amp = std::sqrt(std::pow(10.0, -path_loss_db(kind, d) / 10.0));
    const std::complex<double> g = fading == FadingMode::rayleigh ? rng.complex_gaussian() : std::complex<double>(1.0);
    return amp * g;
  };

  const Eigen::Vector2d bs = Eigen::Vector2d::Zero();
  ChannelRealization ch;
  ch.cellToBs.resize(cfg.J, cfg.K);
  ch.d2dToBs.resize(cfg.J_D);
  ch.d2dPair.resize(cfg.J_D);
  ch.cellToD2d.resize(cfg.J, cfg.J_D);
  ch.noisePowerW = cfg.noise_power_w();

  for (int j = 0; j < cfg.J; ++j)
    for (int k = 0; k < cfg.K; ++k) ch.cellToBs(j, k) = gain(LinkKind::cellular, geo.cellUserPositions[j], bs);
  for (int l = 0; l < cfg.J_D; ++l) {
    ch.d2dToBs[l] = gain(LinkKind::cellular, geo.d2dTxPositions[l], bs);
    ch.d2dPair[l] = gain(LinkKind::d2d, geo.d2dTxPositions[l], geo.d2dRxPositions[l]);
    for (int j = 0; j < cfg.J; ++j) ch.cellToD2d(j, l) = gain(LinkKind::d2d, geo.cellUserPositions[j], geo.d2dRxPositions[l]);
  }
  return ch;
}

/// Geometry and fading for `cfg.seed`, each from its own derived stream.
inline ChannelRealization sample_scenario(const ScenarioConfig& cfg, FadingMode fading = FadingMode::rayleigh) {
  RandomStream geoRng(cfg.seed, Stream::geometry);
  RandomStream fadeRng(cfg.seed, Stream::fading);
  const NodeGeometry geo = sample_geometry(cfg, geoRng);
  return sample_channels(cfg, geo, fadeRng, fading);
}

/// CSV dump, one row per link: type,i,j,real,imag (zero-based indices).
/// Types: cb (user i, subcarrier j), db (pair i), dd (pair i), cd (user i,
/// pair j), noise (watts in `real`).
inline void write_channel_csv(std::ostream& os, const ChannelRealization& ch) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  os << "type,i,j,real,imag\n";
  for (int j = 0; j < ch.users(); ++j)
    for (int k = 0; k < ch.subcarriers(); ++k)
      os << "cb," << j << ',' << k << ',' << ch.cellToBs(j, k).real() << ',' << ch.cellToBs(j, k).imag() << '\n';
  for (int l = 0; l < ch.pairs(); ++l) {
    os << "db," << l << ",0," << ch.d2dToBs[l].real() << ',' << ch.d2dToBs[l].imag() << '\n';
    os << "dd," << l << ",0," << ch.d2dPair[l].real() << ',' << ch.d2dPair[l].imag() << '\n';
  }
  for (int j = 0; j < ch.users(); ++j)
    for (int l = 0; l < ch.pairs(); ++l)
      os << "cd," << j << ',' << l << ',' << ch.cellToD2d(j, l).real() << ',' << ch.cellToD2d(j, l).imag() << '\n';
  os << "noise,0,0," << ch.noisePowerW << ",0\n";
  os.precision(old);
}

}  // namespace scmad2d

#endif  // SCMAD2D_CHANNEL_HPP
