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

#ifndef SCMAD2D_RANDOM_HPP
#define SCMAD2D_RANDOM_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace scmad2d {

/// Stream identifiers used to split one experiment seed into independent
/// generators. Geometry and fading are drawn from separate streams so that
/// changing e.g. the number of D2D pairs never perturbs the fading of links
/// that exist in both configurations.
enum class Stream : std::uint64_t {
  geometry = 1,
  fading = 2,
  baseline = 3,
  skeleton = 4,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of stream `s` derived from an experiment seed:
///   splitmix64(splitmix64(seed) ^ (id * golden_ratio_64)).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t streamId) noexcept {
  return splitmix64(splitmix64(seed) ^ (streamId * 0x9E3779B97F4A7C15ULL));
}

/// A seedable mt19937_64 with portable uniform and Gaussian transforms.
///
/// The standard distributions are implementation-defined, so doubles are
/// built from the top 53 bits of each draw and normals come from Box-Muller.
/// Given the same seed every conforming platform yields the same sequence.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t seed, Stream stream)
      : engine_(derive_seed(seed, static_cast<std::uint64_t>(stream))) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_closed() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double standard_normal() {
    if (hasSpare_) {
      hasSpare_ = false;
      return spare_;
    }
    const double u1 = uniform_open_closed();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    hasSpare_ = true;
    return r * std::cos(phi);
  }

  /// Circularly-symmetric complex Gaussian with E|g|^2 = 1.
  std::complex<double> complex_gaussian() {
    const double re = standard_normal();
    const double im = standard_normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
  }

  std::mt19937_64& engine() noexcept { return engine_; }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool hasSpare_ = false;
};

}  // namespace scmad2d

#endif  // SCMAD2D_RANDOM_HPP
