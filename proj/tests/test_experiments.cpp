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

#include <sstream>
#include <string>
#include <vector>

#include "scmad2d/experiments.hpp"

using namespace scmad2d;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string l;
  while (std::getline(is, l)) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string f;
  while (std::getline(is, f, ',')) out.push_back(f);
  return out;
}

ExperimentSpec spec_of(ExperimentKind kind, int seeds) {
  ExperimentSpec s;
  s.kind = kind;
  s.numSeeds = seeds;
  return s;
}

}  // namespace

TEST(Spec, Validation) {
  auto s = spec_of(ExperimentKind::sweepCellularCap, 1);
  s.sweepValuesDbm.clear();
  EXPECT_THROW(s.validate(), ConfigError);
  s = spec_of(ExperimentKind::convergence, 0);
  EXPECT_THROW(s.validate(), ConfigError);
  s = spec_of(ExperimentKind::convergence, 3);
  s.scenario.seed = 7;
  EXPECT_EQ(s.seeds(), (std::vector<std::uint64_t>{7, 8, 9}));
}

TEST(Convergence, SingleSeedTrace) {
  auto s = spec_of(ExperimentKind::convergence, 1);
  std::ostringstream csv;
  const auto r = run_convergence(s, &csv);
  ASSERT_EQ(r.runs.size(), 1u);
  ASSERT_TRUE(r.runs[0].feasible);
  EXPECT_LE(r.runs[0].trace.iterationsUsed, 10);
  EXPECT_TRUE(r.runs[0].trace.converged);
  EXPECT_LE(r.runs[0].trace.rateSettledIteration, 6);
  const auto rows = lines(csv.str());
  EXPECT_EQ(rows.size(), 2 + r.runs[0].trace.perIteration.size());
  EXPECT_EQ(rows[0].substr(0, 15), "seed,iteration,");
}

TEST(Convergence, OneStepBudget) {
  auto s = spec_of(ExperimentKind::convergence, 1);
  s.tMax = 1;
  const auto r = run_convergence(s);
  EXPECT_EQ(r.runs[0].trace.perIteration.size(), 1u);
}

TEST(Convergence, TwoSeedsGiveDistinctTraces) {
  auto s = spec_of(ExperimentKind::convergence, 2);
  s.scenario.seed = 3;
  std::ostringstream csv;
  const auto r = run_convergence(s, &csv);
  ASSERT_TRUE(r.runs[0].feasible && r.runs[1].feasible);
  EXPECT_NE(r.runs[0].trace.final_sum_rate(), r.runs[1].trace.final_sum_rate());
  int first = 0, second = 0;
  for (const auto& l : lines(csv.str())) {
    if (l.rfind("3,", 0) == 0) ++first;
    if (l.rfind("4,", 0) == 0) ++second;
  }
  EXPECT_GT(first, 0);
  EXPECT_GT(second, 0);
}

TEST(Convergence, InfeasibleSeedIsCountedNotWritten) {
  auto s = spec_of(ExperimentKind::convergence, 1);
  s.scenario.seed = 2;
  std::ostringstream csv;
  const auto r = run_convergence(s, &csv);
  EXPECT_EQ(r.infeasible, 1);
  EXPECT_TRUE(csv.str().empty());
}

TEST(Convergence, SolverTraceRows) {
  auto s = spec_of(ExperimentKind::convergence, 1);
  std::ostringstream trace;
  run_convergence(s, nullptr, &trace);
  const auto rows = lines(trace.str());
  ASSERT_GT(rows.size(), 1u);
  EXPECT_EQ(rows[0], "seed,iteration,outer,t,objective,gap");
  EXPECT_EQ(fields(rows[1]).size(), 6u);
}

TEST(Sweep, SingleValueSingleRow) {
  auto s = spec_of(ExperimentKind::sweepCellularCap, 3);
  s.sweepValuesDbm = {28.0};
  const auto r = run_sweep(s);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].sweepValueDbm, 28.0);
  EXPECT_EQ(r.rows[0].numSeeds, 3);
  EXPECT_EQ(r.samples.size(), 3u);
}

TEST(Sweep, MeansExcludeInfeasibleDraws) {
  auto s = spec_of(ExperimentKind::sweepD2dCap, 4);
  s.sweepValuesDbm = {30.0};
  const auto r = run_sweep(s);
  double sum = 0.0;
  int n = 0, bad = 0;
  for (const auto& x : r.samples) {
    if (x.feasible) {
      sum += x.proposed;
      ++n;
    } else {
      ++bad;
    }
  }
  EXPECT_EQ(r.rows[0].numInfeasibleDraws, bad);
  EXPECT_GE(bad, 1);  // seed 2 cannot meet the floors
  EXPECT_DOUBLE_EQ(r.rows[0].meanSumRateProposed, sum / n);
}

TEST(Sweep, CsvSchemasAndSeedColumn) {
  auto s = spec_of(ExperimentKind::sweepCellularCap, 2);
  s.sweepValuesDbm = {24.0, 26.0};
  const auto r = run_sweep(s);
  std::ostringstream samples, summary;
  write_sweep_samples_csv(samples, r, s);
  write_sweep_summary_csv(summary, r, s);
  const auto a = lines(samples.str());
  ASSERT_EQ(a.size(), 5u);
  EXPECT_EQ(a[0], "sweep_value_dbm,seed,status,proposed_bits,random_bits,random_feasible,random_draws");
  EXPECT_EQ(fields(a[1])[1], "1");
  EXPECT_EQ(fields(a[2])[2], "infeasible");
  const auto b = lines(summary.str());
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0], "sweep_value_dbm,mean_proposed_bits,mean_random_bits,num_seeds,num_infeasible,num_random_infeasible");

  s.reportBitsPerSecond = true;
  std::ostringstream bps;
  write_sweep_summary_csv(bps, r, s);
  const auto c = lines(bps.str());
  EXPECT_EQ(fields(c[0])[1], "mean_proposed_bps");
  EXPECT_NEAR(std::stod(fields(c[1])[1]), std::stod(fields(b[1])[1]) * 180e3, 1e-6 * std::stod(fields(c[1])[1]));
}

TEST(Sweep, ByteIdenticalReruns) {
  auto s = spec_of(ExperimentKind::sweepD2dCap, 2);
  s.sweepValuesDbm = {26.0};
  std::ostringstream a, b;
  write_sweep_samples_csv(a, run_sweep(s), s);
  write_sweep_samples_csv(b, run_sweep(s), s);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Comparison, ProposedBeatsRandomPerSeed) {
  auto s = spec_of(ExperimentKind::baselineComparison, 4);
  const auto r = run_comparison(s);
  ASSERT_EQ(r.rows.size(), 1u);
  for (const auto& x : r.samples) {
    if (x.feasible && x.randomFeasible) {
      EXPECT_GE(x.proposed, x.random);
    }
  }
}

TEST(BoundValidation, NoViolationsAtTableDimensions) {
  auto s = spec_of(ExperimentKind::boundValidation, 20);
  std::ostringstream csv;
  const auto r = run_bound_validation(s, &csv);
  EXPECT_EQ(r.draws, 20);
  EXPECT_EQ(r.eigenvalueViolations, 0);
  EXPECT_EQ(r.capacityViolations, 0);
  const auto rows = lines(csv.str());
  EXPECT_EQ(rows.size(), 1u + 20u * 4u);
  EXPECT_EQ(rows[0], "seed,k,lower,exact,upper");
}

TEST(BoundValidation, OneByOneUpperIsExact) {
  auto s = spec_of(ExperimentKind::boundValidation, 5);
  s.scenario.J = 1;
  s.scenario.K = 1;
  s.scenario.N = 1;
  s.scenario.J_D = 0;
  std::ostringstream csv;
  run_bound_validation(s, &csv);
  const auto rows = lines(csv.str());
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields(rows[i]);
    EXPECT_NEAR(std::stod(f[3]), std::stod(f[4]), 1e-12 * std::stod(f[4]));
  }
}

TEST(BoundValidation, ZeroPowerSkeletonCollapses) {
  // All three coincide with Ntilde when the skeleton carries no power.
  ScenarioConfig cfg;
  const auto g = build_factor_graph(4, 6, 2);
  const auto ch = sample_scenario(cfg);
  auto alloc = PowerAllocation::zeros(6, 4, 1);
  alloc.d2d[0] = 0.5;
  const auto noise = equivalent_noise(ch, alloc, Occupancy::identity(1));
  const auto r = capacity_bound_report(ch, skeleton_covariances(default_skeleton(g, 0.0)), noise);
  Eigen::VectorXd sorted = noise.perSubcarrier;
  std::sort(sorted.data(), sorted.data() + 4);
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(r.perEigenvalue[k].lower, sorted[k], 1e-12 * sorted[k]);
    EXPECT_NEAR(r.perEigenvalue[k].lambda, sorted[k], 1e-12 * sorted[k]);
    EXPECT_NEAR(r.perEigenvalue[k].upper, sorted[k], 1e-12 * sorted[k]);
  }
}
