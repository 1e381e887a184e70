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

#include <cmath>
#include <set>
#include <sstream>

#include "scmad2d/power_allocator.hpp"

using namespace scmad2d;

namespace {

struct Scenario {
  ScenarioConfig cfg;
  FactorGraph graph;
  ChannelRealization ch;
  Occupancy occ;
};

Scenario table_scenario(std::uint64_t seed, int pairs = 1) {
  ScenarioConfig cfg;
  cfg.J_D = pairs;
  cfg.seed = seed;
  return {cfg, build_factor_graph(cfg.K, cfg.J, cfg.N), sample_scenario(cfg), Occupancy::identity(pairs)};
}

Scenario mini_scenario(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.J = 2;
  cfg.K = 2;
  cfg.N = 1;
  cfg.J_D = 1;
  cfg.cellularSinrFloorDb = -100.0;
  cfg.d2dSinrFloorDb = -100.0;
  cfg.seed = seed;
  return {cfg, build_factor_graph(2, 2, 1), sample_scenario(cfg), Occupancy::identity(1)};
}

Eigen::VectorXd random_positive(int n, RandomStream& rng) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = std::exp(rng.uniform(-5.0, 0.0));
  return x;
}

}  // namespace

TEST(BuildP2, TableCounts) {
  const auto s = table_scenario(1);
  const auto p2 = build_p2(s.cfg, s.ch, s.graph, s.occ);
  EXPECT_EQ(p2.num_variables(), 13);
  EXPECT_EQ(p2.constraints.size(), 26u);
  EXPECT_EQ(p2.constraintLabels.size(), 26u);
  EXPECT_EQ(p2.numeratorFactors.size(), 5u);
  EXPECT_EQ(p2.denominatorFactors.size(), 5u);
  EXPECT_EQ(p2.registry->name(0), "P1_1");
  EXPECT_EQ(p2.registry->name(12), "Pd1");
  EXPECT_EQ(p2.constraintLabels.front(), "C1 j=1 k=1");
  EXPECT_EQ(p2.constraintLabels.back(), "C4 l=1");
  for (const auto& g : p2.denominatorFactors) {
    bool hasNoise = false;
    for (const auto& t : g.terms())
      if (t.exponents().isZero() && t.coefficient() == s.ch.noisePowerW) hasNoise = true;
    EXPECT_TRUE(hasNoise);
  }
}

TEST(BuildP2, NoD2dPairs) {
  const auto s = table_scenario(1, 0);
  const auto p2 = build_p2(s.cfg, s.ch, s.graph, s.occ);
  EXPECT_EQ(p2.num_variables(), 12);
  EXPECT_EQ(p2.denominatorFactors.size(), 4u);
  EXPECT_EQ(p2.constraints.size(), 24u);
  for (const auto& f : p2.numeratorFactors) {
    ASSERT_EQ(f.size(), 1u);
    EXPECT_EQ(f.terms()[0].coefficient(), s.ch.noisePowerW);
    EXPECT_TRUE(f.terms()[0].exponents().isZero());
  }
}

TEST(BuildP2, UnoccupiedSubcarrierHasNoiseOnlyNumerator) {
  const auto s = table_scenario(2);
  const auto p2 = build_p2(s.cfg, s.ch, s.graph, s.occ);
  EXPECT_EQ(p2.numeratorFactors[0].size(), 2u);
  for (int k = 1; k < 4; ++k) {
    ASSERT_EQ(p2.numeratorFactors[k].size(), 1u);
    EXPECT_EQ(p2.numeratorFactors[k].terms()[0].coefficient(), s.ch.noisePowerW);
  }
}

TEST(BuildP2, DimensionMismatch) {
  auto s = table_scenario(1);
  EXPECT_THROW(build_p2(s.cfg, s.ch, s.graph, Occupancy::identity(2)), DimensionError);
  s.cfg.J_D = 2;
  EXPECT_THROW(build_p2(s.cfg, s.ch, s.graph, s.occ), DimensionError);
}

TEST(BuildP2, ConstraintsEncodeFloorsAndCaps) {
  const auto s = table_scenario(4);
  const auto p2 = build_p2(s.cfg, s.ch, s.graph, s.occ);
  RandomStream rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd x = random_positive(13, rng);
    const auto a = p2.unpack(x);
    const auto noise = equivalent_noise(s.ch, a, s.occ);
    for (std::size_t v = 0; v < p2.cellularVariables.size(); ++v) {
      const auto [j, k] = p2.cellularVariables[v];
      const double c1 = s.cfg.cellular_sinr_floor() / cellular_sinr(s.ch, a, noise, s.graph, j, k);
      EXPECT_NEAR(p2.constraints[v].eval(x), c1, 1e-12 * c1);
      EXPECT_NEAR(p2.constraints[13 + v].eval(x), a.cellular(j, k) * 2.0 / s.cfg.cellular_cap_w(), 1e-15);
    }
    const double c2 = s.cfg.d2d_sinr_floor() / d2d_sinr(s.ch, a, s.graph, 0, s.occ);
    EXPECT_NEAR(p2.constraints[12].eval(x), c2, 1e-12 * c2);
    EXPECT_NEAR(p2.constraints[25].eval(x), a.d2d[0] / s.cfg.d2d_cap_w(), 1e-15);
  }
}

TEST(ExpandDenominator, TwoBinomials) {
  P2Problem p2;
  p2.registry = make_registry(4);
  const auto& r = p2.registry;
  p2.denominatorFactors = {Posynomial(Monomial::variable(r, 0)) + Monomial::variable(r, 1),
                           Posynomial(Monomial::variable(r, 2)) + Monomial::variable(r, 3)};
  EXPECT_EQ(expand_denominator(p2).size(), 4u);
}

TEST(ExpandDenominator, ConstantFactorScales) {
  P2Problem p2;
  p2.registry = make_registry(2);
  const auto& r = p2.registry;
  const Posynomial q = Posynomial(Monomial::variable(r, 0, 1.0, 2.0)) + Monomial::variable(r, 1, 1.0, 3.0);
  p2.denominatorFactors = {q, Posynomial(Monomial::constant(r, 0.5))};
  const auto e = expand_denominator(p2);
  ASSERT_EQ(e.size(), 2u);
  EXPECT_DOUBLE_EQ(e.terms()[0].coefficient(), 1.0);
  EXPECT_DOUBLE_EQ(e.terms()[1].coefficient(), 1.5);
}

TEST(ExpandDenominator, TableScenarioHomomorphism) {
  const auto s = table_scenario(3);
  const auto p2 = build_p2(s.cfg, s.ch, s.graph, s.occ);
  const auto e = expand_denominator(p2);
  std::size_t count = 1;
  for (const auto& g : p2.denominatorFactors) count *= g.size();
  EXPECT_EQ(count, 1600u);
  // Terms merge where two factors share variables (subcarrier 1 and the pair).
  std::set<std::vector<long long>> distinct;
  std::vector<std::size_t> idx(p2.denominatorFactors.size(), 0);
  for (std::size_t n = 0; n < count; ++n) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(13);
    std::size_t rest = n;
    for (std::size_t f = 0; f < idx.size(); ++f) {
      const auto& terms = p2.denominatorFactors[f].terms();
      a += terms[rest % terms.size()].exponents();
      rest /= terms.size();
    }
    std::vector<long long> key;
    for (int i = 0; i < 13; ++i) key.push_back(std::llround(a[i]));
    distinct.insert(key);
  }
  EXPECT_EQ(e.size(), distinct.size());
  EXPECT_LT(e.size(), count);
  RandomStream rng(3);
  for (int i = 0; i < 5; ++i) {
    const auto x = random_positive(13, rng);
    double prod = 1.0;
    for (const auto& g : p2.denominatorFactors) prod *= g.eval(x);
    EXPECT_NEAR(e.eval(x), prod, 1e-10 * prod);
  }
}

TEST(ExpandDenominator, CondensedProductFactorizes) {
  // Weights of a product term are products of the factor weights, so the
  // condensed product equals the product of condensed factors.
  const auto s = table_scenario(5);
  const auto p2 = build_p2(s.cfg, s.ch, s.graph, s.occ);
  RandomStream rng(5);
  const auto x0 = random_positive(13, rng);
  const auto whole = condense(expand_denominator(p2), x0);
  Monomial parts = Monomial::constant(p2.registry, 1.0);
  for (const auto& g : p2.denominatorFactors) parts = parts * condense(g, x0);
  EXPECT_NEAR(std::log(whole.coefficient()), std::log(parts.coefficient()), 1e-9);
  EXPECT_LT((whole.exponents() - parts.exponents()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SumRate, ZeroPowerIsZero) {
  const auto s = table_scenario(1);
  EXPECT_EQ(sum_rate(s.ch, s.graph, s.occ, PowerAllocation::zeros(6, 4, 1)), 0.0);
}

TEST(SumRate, UnitSinrLinksGiveWholeBits) {
  // One user, one subcarrier, one pair; all gains 1 and N_0 = 1.
  const FactorGraph g(Eigen::MatrixXi::Ones(1, 1));
  ChannelRealization ch;
  ch.cellToBs = Eigen::MatrixXcd::Ones(1, 1);
  ch.d2dToBs = Eigen::VectorXcd::Ones(1);
  ch.d2dPair = Eigen::VectorXcd::Ones(1);
  ch.cellToD2d = Eigen::MatrixXcd::Ones(1, 1);
  ch.noisePowerW = 1.0;
  // Cellular: 2 / (1 + 1) = 1; D2D: 1 / (1 + 2) -> choose P' so both are unit.
  PowerAllocation a{Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Constant(1, 3.0)};
  // Cellular SINR 2 / (1 + 3) = 0.5, D2D 3 / (1 + 2) = 1.
  EXPECT_DOUBLE_EQ(d2d_capacity(ch, a, g, Occupancy::identity(1)), 1.0);
  a.cellular(0, 0) = 4.0;
  a.d2d[0] = 5.0;
  // Cellular 4 / 6, D2D 5 / 5 = 1.
  EXPECT_DOUBLE_EQ(d2d_capacity(ch, a, g, Occupancy::identity(1)), 1.0);
  a.cellular(0, 0) = 6.0;
  a.d2d[0] = 7.0;
  // Cellular 6 / 8 ... not integer; use the no-pair case for the cellular side.
  const FactorGraph g1(Eigen::MatrixXi::Ones(1, 1));
  ChannelRealization c1 = ch;
  c1.d2dToBs.resize(0);
  c1.d2dPair.resize(0);
  c1.cellToD2d.resize(1, 0);
  PowerAllocation a1{Eigen::MatrixXd::Constant(1, 1, 3.0), Eigen::VectorXd()};
  EXPECT_DOUBLE_EQ(sum_rate(c1, g1, Occupancy{}, a1), 2.0);
}

TEST(SumRate, FactorRouteMatchesCapacityRoute) {
  for (int pairs : {1, 2}) {
    const auto s = table_scenario(6, pairs);
    const auto p2 = build_p2(s.cfg, s.ch, s.graph, s.occ);
    RandomStream rng(6);
    for (int i = 0; i < 5; ++i) {
      const auto a = p2.unpack(random_positive(p2.num_variables(), rng));
      const double direct = sum_rate(s.ch, s.graph, s.occ, a);
      EXPECT_NEAR(sum_rate_from_factors(p2, a), direct, 1e-10 * direct);
    }
  }
}

TEST(Allocate, TableScenarioTrace) {
  const auto s = table_scenario(1);
  const auto tr = allocate(s.cfg, s.ch, s.graph, s.occ);
  ASSERT_FALSE(tr.perIteration.empty());
  EXPECT_LE(tr.iterationsUsed, 10);
  EXPECT_TRUE(tr.converged);
  double prev = tr.startSumRateBits;
  for (const auto& r : tr.perIteration) {
    EXPECT_GE(r.sumRateBits, prev - 1e-8);
    prev = r.sumRateBits;
  }
  const double fin = tr.final_sum_rate();
  ASSERT_GE(tr.perIteration.size(), 5u);
  EXPECT_LE(std::abs(tr.perIteration[4].sumRateBits - fin), 1e-3 * fin);
}

TEST(Allocate, FastConvergenceOnFixedSeed) {
  const auto s = table_scenario(10);
  const auto tr = allocate(s.cfg, s.ch, s.graph, s.occ);
  EXPECT_TRUE(tr.converged);
  EXPECT_GE(tr.rateSettledIteration, 1);
  EXPECT_LE(tr.rateSettledIteration, 5);
}

TEST(Allocate, SomeVariableSaturatesItsCap) {
  const auto s = table_scenario(1);
  const auto tr = allocate(s.cfg, s.ch, s.graph, s.occ);
  const auto p2 = build_p2(s.cfg, s.ch, s.graph, s.occ);
  const Eigen::VectorXd x = p2.pack(tr.final_powers());
  double closest = 1.0;
  for (int v = 0; v < 12; ++v) closest = std::min(closest, 1.0 - x[v] * 2.0 / s.cfg.cellular_cap_w());
  closest = std::min(closest, 1.0 - x[12] / s.cfg.d2d_cap_w());
  EXPECT_LE(closest, 1e-6);
}

TEST(Allocate, IteratesStayFeasibleAndOnSupport) {
  for (std::uint64_t seed : {1u, 3u, 5u}) {
    for (int pairs : {1, 2}) {
      const auto s = table_scenario(seed, pairs);
      const auto p2 = build_p2(s.cfg, s.ch, s.graph, s.occ);
      IterationTrace tr;
      try {
        tr = allocate(s.cfg, s.ch, s.graph, s.occ);
      } catch (const InfeasibleProblem&) {
        continue;
      }
      for (const auto& r : tr.perIteration) {
        EXPECT_NO_THROW(r.powers.check(s.graph));
        EXPECT_LE(std::log(p2.max_constraint(p2.pack(r.powers))), 1e-8);
      }
    }
  }
}

TEST(Allocate, FixedPointIsStable) {
  const auto s = table_scenario(10);
  const auto tr = allocate(s.cfg, s.ch, s.graph, s.occ);
  ASSERT_TRUE(tr.converged);
  const auto p2 = build_p2(s.cfg, s.ch, s.graph, s.occ);
  const Eigen::VectorXd x = p2.pack(tr.final_powers());
  ConvexFormProblem gp =
      to_convex_form(expand_numerator(p2) * condense(expand_denominator(p2), x).inverse(), p2.constraints);
  const auto r = solve(gp, x.array().log().matrix());
  ASSERT_EQ(r.status, SolverStatus::optimal);
  EXPECT_LE(((r.x - x).array().abs() / x.array()).maxCoeff(), 1e-5);
}

TEST(Allocate, SingleStepBudget) {
  const auto s = table_scenario(1);
  const auto tr = allocate(s.cfg, s.ch, s.graph, s.occ, 1);
  EXPECT_EQ(tr.perIteration.size(), 1u);
  EXPECT_EQ(tr.iterationsUsed, 1);
  EXPECT_THROW(allocate(s.cfg, s.ch, s.graph, s.occ, 0), DomainError);
}

TEST(Allocate, InfeasibleDrawIsReported) {
  const auto s = table_scenario(2);
  EXPECT_THROW(allocate(s.cfg, s.ch, s.graph, s.occ), InfeasibleProblem);
}

TEST(Allocate, MiniatureMatchesGridSearch) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto s = mini_scenario(seed);
    const auto p2 = build_p2(s.cfg, s.ch, s.graph, s.occ);
    const auto tr = allocate(s.cfg, s.ch, s.graph, s.occ, 50);
    const Eigen::Vector3d cap(s.cfg.cellular_cap_w(), s.cfg.cellular_cap_w(), s.cfg.d2d_cap_w());
    double best = 0.0;
    for (int a = 0; a < 40; ++a)
      for (int b = 0; b < 40; ++b)
        for (int c = 0; c < 40; ++c) {
          const Eigen::Vector3d x(cap[0] * std::pow(10.0, -8.0 * (39 - a) / 39.0),
                                  cap[1] * std::pow(10.0, -8.0 * (39 - b) / 39.0),
                                  cap[2] * std::pow(10.0, -8.0 * (39 - c) / 39.0));
          if (p2.max_constraint(x) > 1.0) continue;
          best = std::max(best, sum_rate(s.ch, s.graph, s.occ, p2.unpack(x)));
        }
    EXPECT_NEAR(tr.final_sum_rate(), best, 1e-2 * best) << "seed " << seed;
  }
}

TEST(Baseline, ZeroCapsGiveZeros) {
  auto s = table_scenario(1);
  s.cfg.cellularPowerCapDbm = -std::numeric_limits<double>::infinity();
  s.cfg.d2dPowerCapDbm = -std::numeric_limits<double>::infinity();
  RandomStream rng(1, Stream::baseline);
  const auto b = random_baseline(s.cfg, s.ch, s.graph, s.occ, rng);
  EXPECT_FALSE(b.feasible);
  EXPECT_TRUE(b.powers.cellular.isZero());
  EXPECT_TRUE(b.powers.d2d.isZero());
}

TEST(Baseline, Deterministic) {
  const auto s = table_scenario(7);
  RandomStream r1(7, Stream::baseline), r2(7, Stream::baseline);
  const auto a = random_baseline(s.cfg, s.ch, s.graph, s.occ, r1);
  const auto b = random_baseline(s.cfg, s.ch, s.graph, s.occ, r2);
  EXPECT_EQ(a.powers.cellular, b.powers.cellular);
  EXPECT_EQ(a.powers.d2d, b.powers.d2d);
  EXPECT_EQ(a.draws, b.draws);
}

TEST(Baseline, FeasibleDrawMeetsFloorsAndCaps) {
  int feasible = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = table_scenario(seed);
    RandomStream rng(seed, Stream::baseline);
    const auto b = random_baseline(s.cfg, s.ch, s.graph, s.occ, rng);
    EXPECT_NO_THROW(b.powers.check(s.graph));
    EXPECT_LE(b.draws, 1000);
    EXPECT_LE(b.powers.cellular.maxCoeff(), s.cfg.cellular_cap_w() / 2.0);
    EXPECT_LE(b.powers.d2d.maxCoeff(), s.cfg.d2d_cap_w());
    if (!b.feasible) continue;
    ++feasible;
    const auto p2 = build_p2(s.cfg, s.ch, s.graph, s.occ);
    EXPECT_LE(p2.max_constraint(p2.pack(b.powers)), 1.0 + 1e-12);
  }
  EXPECT_GT(feasible, 0);
}

TEST(Trace, CsvLayout) {
  const auto s = table_scenario(1);
  const auto p2 = build_p2(s.cfg, s.ch, s.graph, s.occ);
  const auto tr = allocate(s.cfg, s.ch, s.graph, s.occ, 2);
  std::ostringstream os;
  write_iteration_trace_csv(os, p2, tr);
  std::istringstream is(os.str());
  std::string header, line;
  std::getline(is, header);
  EXPECT_EQ(header.substr(0, 31), "iteration,P1_1_W,P1_1_dBm,P1_2_");
  EXPECT_EQ(header.substr(header.size() - 27), "Pd1_W,Pd1_dBm,sum_rate_bits");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 1 + static_cast<int>(tr.perIteration.size()));
}
