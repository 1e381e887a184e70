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

#ifndef SCMAD2D_EXPERIMENTS_HPP
#define SCMAD2D_EXPERIMENTS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "scmad2d/capacity.hpp"
#include "scmad2d/channel.hpp"
#include "scmad2d/config.hpp"
#include "scmad2d/errors.hpp"
#include "scmad2d/gp_solver.hpp"
#include "scmad2d/power_allocator.hpp"
#include "scmad2d/random.hpp"
#include "scmad2d/scma.hpp"

namespace scmad2d {

enum class ExperimentKind { convergence, sweepCellularCap, sweepD2dCap, boundValidation, baselineComparison };

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::convergence;
  ScenarioConfig scenario;
  std::vector<double> sweepValuesDbm{24.0, 26.0, 28.0, 30.0, 32.0};
  int numSeeds = 50;
  int tMax = 10;
  bool reportBitsPerSecond = false;
  std::string outputPath;
  SolverSettings solver;

  static ExperimentSpec from_run_config(ExperimentKind kind, const RunConfig& rc) {
    ExperimentSpec s;
    s.kind = kind;
    s.scenario = rc.scenario;
    s.sweepValuesDbm = rc.sweepValuesDbm;
    s.numSeeds = rc.numSeeds;
    s.tMax = rc.tMax;
    s.reportBitsPerSecond = rc.reportBitsPerSecond;
    return s;
  }

  void validate() const {
    scenario.validate();
    if (numSeeds < 1) throw ConfigError("invalid numSeeds: must be >= 1", 0, "numSeeds");
    if (tMax < 1) throw ConfigError("invalid tMax: must be >= 1", 0, "tMax");
    const bool sweep = kind == ExperimentKind::sweepCellularCap || kind == ExperimentKind::sweepD2dCap;
    if (sweep && sweepValuesDbm.empty()) throw ConfigError("invalid sweepValuesDbm: must not be empty", 0, "sweepValuesDbm");
    solver.check();
  }

  /// Seeds scenario.seed, scenario.seed + 1, ...
  std::vector<std::uint64_t> seeds() const {
    std::vector<std::uint64_t> out;
    for (int i = 0; i < numSeeds; ++i) out.push_back(scenario.seed + static_cast<std::uint64_t>(i));
    return out;
  }

  double rate_scale() const { return reportBitsPerSecond ? scenario.bandwidthHz : 1.0; }
  const char* rate_suffix() const { return reportBitsPerSecond ? "bps" : "bits"; }
};

inline ScenarioConfig with_seed(ScenarioConfig cfg, std::uint64_t seed) {
  cfg.seed = seed;
  return cfg;
}

namespace detail {

inline void write_solver_trace_rows(std::ostream& os, std::uint64_t seed, const IterationTrace& tr) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < tr.perIteration.size(); ++i)
    for (const auto& b : tr.perIteration[i].solverTrace)
      os << seed << ',' << i + 1 << ',' << b.outer << ',' << b.t << ',' << b.objective << ',' << b.gap << '\n';
  os.precision(old);
}

inline void write_double(std::ostream& os, double v) {
  if (std::isnan(v))
    os << "nan";
  else
    os << v;
}

}  // namespace detail

/// Solver trace CSV header: seed,iteration,outer,t,objective,gap.
inline void write_solver_trace_header(std::ostream& os) { os << "seed,iteration,outer,t,objective,gap\n"; }

struct SeedRun {
  std::uint64_t seed = 0;
  bool feasible = false;
  IterationTrace trace;
};

struct ConvergenceResult {
  std::vector<SeedRun> runs;
  int infeasible = 0;
};

/// One allocate trace per seed. Rows: seed,iteration,<var>_W,<var>_dBm,...,
/// sum_rate_bits; infeasible seeds produce no rows and are counted.
inline ConvergenceResult run_convergence(const ExperimentSpec& spec, std::ostream* csv = nullptr,
                                         std::ostream* solverTrace = nullptr) {
  spec.validate();
  const ScenarioConfig& base = spec.scenario;
  const FactorGraph graph = build_factor_graph(base.K, base.J, base.N);
  const Occupancy occ = Occupancy::identity(base.J_D);
  ConvergenceResult out;
  bool headerDone = false;
  if (solverTrace) write_solver_trace_header(*solverTrace);
  for (std::uint64_t seed : spec.seeds()) {
    const ScenarioConfig cfg = with_seed(base, seed);
    const ChannelRealization ch = sample_scenario(cfg);
    SeedRun run;
    run.seed = seed;
    try {
      run.trace = allocate(cfg, ch, graph, occ, spec.tMax, spec.solver);
      run.feasible = true;
    } catch (const InfeasibleProblem&) {
      ++out.infeasible;
    }
    if (run.feasible) {
      const P2Problem p2 = build_p2(cfg, ch, graph, occ);
      if (csv) {
        if (!headerDone) write_iteration_trace_header(*csv, p2, true, spec.reportBitsPerSecond);
        headerDone = true;
        write_iteration_trace_rows(*csv, p2, run.trace, seed, spec.rate_scale());
      }
      if (solverTrace) detail::write_solver_trace_rows(*solverTrace, seed, run.trace);
    }
    out.runs.push_back(std::move(run));
  }
  return out;
}

struct SweepSample {
  double valueDbm = 0.0;
  std::uint64_t seed = 0;
  bool feasible = false;  // the channel admits the SINR floors
  double proposed = std::numeric_limits<double>::quiet_NaN();
  double random = std::numeric_limits<double>::quiet_NaN();
  bool randomFeasible = false;
  int randomDraws = 0;
};

struct SweepRow {
  double sweepValueDbm = 0.0;
  double meanSumRateProposed = std::numeric_limits<double>::quiet_NaN();  // over feasible draws
  double meanSumRateRandom = std::numeric_limits<double>::quiet_NaN();    // over feasible draws with a feasible random draw
  int numInfeasibleDraws = 0;
  int numRandomInfeasible = 0;  // feasible draws where 1000 random draws missed the floors
  int numSeeds = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepSample> samples;  // ordered by (sweep value, seed)
};

namespace detail {

inline SweepSample evaluate_seed(const ScenarioConfig& cfg, double valueDbm, const FactorGraph& graph,
                                 const Occupancy& occ, int tMax, const SolverSettings& solver,
                                 std::ostream* solverTrace) {
  SweepSample s;
  s.valueDbm = valueDbm;
  s.seed = cfg.seed;
  const ChannelRealization ch = sample_scenario(cfg);
  try {
    const IterationTrace tr = allocate(cfg, ch, graph, occ, tMax, solver);
    s.feasible = true;
    s.proposed = tr.final_sum_rate();
    if (solverTrace) write_solver_trace_rows(*solverTrace, cfg.seed, tr);
  } catch (const InfeasibleProblem&) {
    return s;
  }
  RandomStream rng(cfg.seed, Stream::baseline);
  const BaselineDraw b = random_baseline(cfg, ch, graph, occ, rng);
  s.randomFeasible = b.feasible;
  s.randomDraws = b.draws;
  if (b.feasible) s.random = sum_rate(ch, graph, occ, b.powers);
  return s;
}

inline SweepRow summarize(double valueDbm, const std::vector<SweepSample>& samples) {
  SweepRow row;
  row.sweepValueDbm = valueDbm;
  double sp = 0.0, sr = 0.0;
  int np = 0, nr = 0;
  for (const auto& s : samples) {
    ++row.numSeeds;
    if (!s.feasible) {
      ++row.numInfeasibleDraws;
      continue;
    }
    sp += s.proposed;
    ++np;
    if (s.randomFeasible) {
      sr += s.random;
      ++nr;
    } else {
      ++row.numRandomInfeasible;
    }
  }
  if (np > 0) row.meanSumRateProposed = sp / np;
  if (nr > 0) row.meanSumRateRandom = sr / nr;
  return row;
}

}  // namespace detail

/// For every sweep value, overrides P_0 (sweepCellularCap) or P'_0
/// (sweepD2dCap) and runs the proposed allocation and the random baseline
/// on the same channel draws. Channel draws depend only on the seed, so all
/// sweep points share them. Infeasible draws are excluded from the means and
/// counted.
inline SweepResult run_sweep(const ExperimentSpec& spec, std::ostream* solverTrace = nullptr) {
  spec.validate();
  if (spec.kind != ExperimentKind::sweepCellularCap && spec.kind != ExperimentKind::sweepD2dCap)
    throw ConfigError("run_sweep needs a sweep experiment");
  const ScenarioConfig& base = spec.scenario;
  const FactorGraph graph = build_factor_graph(base.K, base.J, base.N);
  const Occupancy occ = Occupancy::identity(base.J_D);
  SweepResult out;
  if (solverTrace) write_solver_trace_header(*solverTrace);
  for (double v : spec.sweepValuesDbm) {
    std::vector<SweepSample> point;
    for (std::uint64_t seed : spec.seeds()) {
      ScenarioConfig cfg = with_seed(base, seed);
      (spec.kind == ExperimentKind::sweepCellularCap ? cfg.cellularPowerCapDbm : cfg.d2dPowerCapDbm) = v;
      point.push_back(detail::evaluate_seed(cfg, v, graph, occ, spec.tMax, spec.solver, solverTrace));
    }
    out.rows.push_back(detail::summarize(v, point));
    out.samples.insert(out.samples.end(), point.begin(), point.end());
  }
  return out;
}

/// Proposed vs random at the configured caps. One row keyed by P_0.
inline SweepResult run_comparison(const ExperimentSpec& spec, std::ostream* solverTrace = nullptr) {
  spec.validate();
  const ScenarioConfig& base = spec.scenario;
  const FactorGraph graph = build_factor_graph(base.K, base.J, base.N);
  const Occupancy occ = Occupancy::identity(base.J_D);
  SweepResult out;
  if (solverTrace) write_solver_trace_header(*solverTrace);
  for (std::uint64_t seed : spec.seeds())
    out.samples.push_back(detail::evaluate_seed(with_seed(base, seed), base.cellularPowerCapDbm, graph, occ, spec.tMax,
                                                spec.solver, solverTrace));
  out.rows.push_back(detail::summarize(base.cellularPowerCapDbm, out.samples));
  return out;
}

/// Per-seed rows: sweep_value_dbm,seed,status,proposed_<u>,random_<u>,
/// random_feasible,random_draws with status "ok" or "infeasible".
inline void write_sweep_samples_csv(std::ostream& os, const SweepResult& r, const ExperimentSpec& spec) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  const std::string u = spec.rate_suffix();
  os << "sweep_value_dbm,seed,status,proposed_" << u << ",random_" << u << ",random_feasible,random_draws\n";
  for (const auto& s : r.samples) {
    os << s.valueDbm << ',' << s.seed << ',' << (s.feasible ? "ok" : "infeasible") << ',';
    detail::write_double(os, s.proposed * spec.rate_scale());
    os << ',';
    detail::write_double(os, s.random * spec.rate_scale());
    os << ',' << (s.randomFeasible ? 1 : 0) << ',' << s.randomDraws << '\n';
  }
  os.precision(old);
}

/// sweep_value_dbm,mean_proposed_<u>,mean_random_<u>,num_seeds,
/// num_infeasible,num_random_infeasible.
inline void write_sweep_summary_csv(std::ostream& os, const SweepResult& r, const ExperimentSpec& spec) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  const std::string u = spec.rate_suffix();
  os << "sweep_value_dbm,mean_proposed_" << u << ",mean_random_" << u
     << ",num_seeds,num_infeasible,num_random_infeasible\n";
  for (const auto& row : r.rows) {
    os << row.sweepValueDbm << ',';
    detail::write_double(os, row.meanSumRateProposed * spec.rate_scale());
    os << ',';
    detail::write_double(os, row.meanSumRateRandom * spec.rate_scale());
    os << ',' << row.numSeeds << ',' << row.numInfeasibleDraws << ',' << row.numRandomInfeasible << '\n';
  }
  os.precision(old);
}

struct BoundValidationResult {
  int draws = 0;
  int eigenvalueViolations = 0;
  int capacityViolations = 0;
};

/// Random skeleton (skeleton stream) and channel per seed; D2D powers at half
/// their cap. Rows: seed,k,lower,exact,upper. With `capacityCsv`, also
/// seed,capacity_lower,capacity_exact,capacity_upper. Violations use 1e-9
/// relative slack.
inline BoundValidationResult run_bound_validation(const ExperimentSpec& spec, std::ostream* csv = nullptr,
                                                  std::ostream* capacityCsv = nullptr) {
  spec.validate();
  const ScenarioConfig& base = spec.scenario;
  const FactorGraph graph = build_factor_graph(base.K, base.J, base.N);
  const Occupancy occ = Occupancy::identity(base.J_D);
  BoundValidationResult out;
  const auto prec = std::numeric_limits<double>::max_digits10;
  if (csv) {
    csv->precision(prec);
    *csv << "seed,k,lower,exact,upper\n";
  }
  if (capacityCsv) {
    capacityCsv->precision(prec);
    *capacityCsv << "seed,capacity_lower,capacity_exact,capacity_upper\n";
  }
  for (std::uint64_t seed : spec.seeds()) {
    const ScenarioConfig cfg = with_seed(base, seed);
    RandomStream skelRng(seed, Stream::skeleton);
    const auto cov = skeleton_covariances(random_skeleton(graph, skelRng, cfg.cellular_cap_w() / graph.user_degree()));
    const ChannelRealization ch = sample_scenario(cfg);
    auto alloc = PowerAllocation::zeros(cfg.J, cfg.K, cfg.J_D);
    alloc.d2d.setConstant(cfg.d2d_cap_w() / 2.0);
    const auto report = capacity_bound_report(ch, cov, equivalent_noise(ch, alloc, occ));
    ++out.draws;
    for (std::size_t k = 0; k < report.perEigenvalue.size(); ++k) {
      const auto& e = report.perEigenvalue[k];
      if (e.lower > e.lambda * (1 + 1e-9) || e.lambda > e.upper * (1 + 1e-9)) ++out.eigenvalueViolations;
      if (csv) *csv << seed << ',' << k << ',' << e.lower << ',' << e.lambda << ',' << e.upper << '\n';
    }
    if (report.lower > report.exact + 1e-9 || report.exact > report.upper + 1e-9) ++out.capacityViolations;
    if (capacityCsv)
      *capacityCsv << seed << ',' << report.lower << ',' << report.exact << ',' << report.upper << '\n';
  }
  return out;
}

}  // namespace scmad2d

#endif  // SCMAD2D_EXPERIMENTS_HPP
