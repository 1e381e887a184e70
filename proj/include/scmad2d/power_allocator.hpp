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

#ifndef SCMAD2D_POWER_ALLOCATOR_HPP
#define SCMAD2D_POWER_ALLOCATOR_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "scmad2d/capacity.hpp"
#include "scmad2d/channel.hpp"
#include "scmad2d/errors.hpp"
#include "scmad2d/gp_solver.hpp"
#include "scmad2d/posynomial.hpp"
#include "scmad2d/random.hpp"
#include "scmad2d/scma.hpp"

namespace scmad2d {

/// The sum-rate maximization written as min prod f / prod g over positive
/// powers, with every constraint as a posynomial <= 1.
///
/// Variable order: P_jk for each user j and k in zeta_j (named "P<j>_<k>",
/// one-based), then P'_l (named "Pd<l>").
struct P2Problem {
  Registry registry;
  std::vector<std::pair<int, int>> cellularVariables;  // (j, k) per variable
  int users = 0;
  int subcarriers = 0;
  int pairs = 0;

  std::vector<Posynomial> numeratorFactors;    // f_0..f_{K-1}, f'_0..f'_{J_D-1}
  std::vector<Posynomial> denominatorFactors;  // g_0..g_{K-1}, g'_0..g'_{J_D-1}
  std::vector<Posynomial> constraints;         // C1, C2, C3, C4 blocks in that order
  std::vector<std::string> constraintLabels;

  int num_variables() const noexcept { return registry->size(); }
  int d2d_variable(int l) const noexcept { return static_cast<int>(cellularVariables.size()) + l; }

  Eigen::VectorXd pack(const PowerAllocation& a) const {
    Eigen::VectorXd x(num_variables());
    for (std::size_t v = 0; v < cellularVariables.size(); ++v)
      x[static_cast<Eigen::Index>(v)] = a.cellular(cellularVariables[v].first, cellularVariables[v].second);
    for (int l = 0; l < pairs; ++l) x[d2d_variable(l)] = a.d2d[l];
    return x;
  }

  PowerAllocation unpack(const Eigen::VectorXd& x) const {
    if (x.size() != num_variables()) throw DimensionError("point has the wrong number of variables");
    auto a = PowerAllocation::zeros(users, subcarriers, pairs);
    for (std::size_t v = 0; v < cellularVariables.size(); ++v)
      a.cellular(cellularVariables[v].first, cellularVariables[v].second) = x[static_cast<Eigen::Index>(v)];
    for (int l = 0; l < pairs; ++l) a.d2d[l] = x[d2d_variable(l)];
    return a;
  }

  /// Largest constraint value at x; <= 1 means feasible.
  double max_constraint(const Eigen::VectorXd& x) const {
    double worst = 0.0;
    for (const auto& c : constraints) worst = std::max(worst, c.eval(x));
    return worst;
  }
};

inline P2Problem build_p2(const ScenarioConfig& cfg, const ChannelRealization& ch, const FactorGraph& graph,
                          const Occupancy& occ) {
  const int J = graph.users();
  const int K = graph.subcarriers();
  const int L = occ.pairs();
  if (ch.users() != J || ch.subcarriers() != K || ch.pairs() != L || cfg.J != J || cfg.K != K || cfg.J_D != L)
    throw DimensionError("build_p2: scenario, channel, graph and occupancy disagree");
  const auto onK = occ.pair_on_subcarrier(K);
  const auto sets = incidence_sets(graph);

  P2Problem p;
  p.users = J;
  p.subcarriers = K;
  p.pairs = L;
  std::vector<std::string> names;
  Eigen::MatrixXi var = Eigen::MatrixXi::Constant(J, K, -1);
  for (int j = 0; j < J; ++j)
    for (int k : sets.zeta[static_cast<std::size_t>(j)]) {
      var(j, k) = static_cast<int>(p.cellularVariables.size());
      p.cellularVariables.emplace_back(j, k);
      names.push_back("P" + std::to_string(j + 1) + "_" + std::to_string(k + 1));
    }
  for (int l = 0; l < L; ++l) names.push_back("Pd" + std::to_string(l + 1));
  p.registry = make_registry(std::move(names));
  const Registry& reg = p.registry;

  const double n0 = ch.noisePowerW;
  auto P = [&](int j, int k, double power = 1.0, double c = 1.0) { return Monomial::variable(reg, var(j, k), power, c); };
  auto Pd = [&](int l, double power = 1.0, double c = 1.0) { return Monomial::variable(reg, p.d2d_variable(l), power, c); };

  // Ntilde_k and the D2D receiver interference f'_l.
  std::vector<Posynomial> ntilde;
  for (int k = 0; k < K; ++k) {
    Posynomial f = Monomial::constant(reg, n0);
    if (const auto l = onK[static_cast<std::size_t>(k)]) f = f + Pd(*l, 1.0, std::norm(ch.d2dToBs[*l]));
    ntilde.push_back(f);
  }
  std::vector<Posynomial> d2dInterference;
  for (int l = 0; l < L; ++l) {
    const int k = occ.pairSubcarrier[static_cast<std::size_t>(l)];
    Posynomial f = Monomial::constant(reg, n0);
    for (int j : sets.xi[static_cast<std::size_t>(k)]) f = f + P(j, k, 1.0, std::norm(ch.cellToD2d(j, l)));
    d2dInterference.push_back(f);
  }

  for (int k = 0; k < K; ++k) {
    p.numeratorFactors.push_back(ntilde[static_cast<std::size_t>(k)]);
    Posynomial g = ntilde[static_cast<std::size_t>(k)];
    for (int j : sets.xi[static_cast<std::size_t>(k)]) g = g + P(j, k, 1.0, std::norm(ch.cellToBs(j, k)));
    p.denominatorFactors.push_back(g);
  }
  for (int l = 0; l < L; ++l) {
    p.numeratorFactors.push_back(d2dInterference[static_cast<std::size_t>(l)]);
    p.denominatorFactors.push_back(d2dInterference[static_cast<std::size_t>(l)] + Pd(l, 1.0, std::norm(ch.d2dPair[l])));
  }

  // C1: gamma_c Ntilde_k / (|h^cb_jk|^2 P_jk) <= 1.
  const double gc = cfg.cellular_sinr_floor();
  for (const auto& [j, k] : p.cellularVariables) {
    const double h2 = std::norm(ch.cellToBs(j, k));
    if (!(h2 > 0.0)) throw DomainError("build_p2: zero cellular gain");
    p.constraints.push_back(ntilde[static_cast<std::size_t>(k)] * P(j, k, -1.0, gc / h2));
    p.constraintLabels.push_back("C1 j=" + std::to_string(j + 1) + " k=" + std::to_string(k + 1));
  }
  // C2: gamma_d f'_l / (|h^dd_l|^2 P'_l) <= 1.
  const double gd = cfg.d2d_sinr_floor();
  for (int l = 0; l < L; ++l) {
    const double h2 = std::norm(ch.d2dPair[l]);
    if (!(h2 > 0.0)) throw DomainError("build_p2: zero D2D gain");
    p.constraints.push_back(d2dInterference[static_cast<std::size_t>(l)] * Pd(l, -1.0, gd / h2));
    p.constraintLabels.push_back("C2 l=" + std::to_string(l + 1));
  }
  // C3: per-subcarrier share of the user cap, P_jk <= P_0 / d_f.
  const double perTone = cfg.cellular_cap_w() / graph.user_degree();
  for (const auto& [j, k] : p.cellularVariables) {
    p.constraints.push_back(P(j, k, 1.0, 1.0 / perTone));
    p.constraintLabels.push_back("C3 j=" + std::to_string(j + 1) + " k=" + std::to_string(k + 1));
  }
  // C4: P'_l <= P'_0.
  for (int l = 0; l < L; ++l) {
    p.constraints.push_back(Pd(l, 1.0, 1.0 / cfg.d2d_cap_w()));
    p.constraintLabels.push_back("C4 l=" + std::to_string(l + 1));
  }
  return p;
}

/// prod_k g_k prod_l g'_l as one expanded posynomial.
inline Posynomial expand_denominator(const P2Problem& p2) {
  Posynomial out = p2.denominatorFactors.front();
  for (std::size_t i = 1; i < p2.denominatorFactors.size(); ++i) out = multiply(out, p2.denominatorFactors[i]);
  return out;
}

inline Posynomial expand_numerator(const P2Problem& p2) {
  Posynomial out = p2.numeratorFactors.front();
  for (std::size_t i = 1; i < p2.numeratorFactors.size(); ++i) out = multiply(out, p2.numeratorFactors[i]);
  return out;
}

/// C_c + C_d in bits/s/Hz.
inline double sum_rate(const ChannelRealization& ch, const FactorGraph& graph, const Occupancy& occ,
                       const PowerAllocation& alloc) {
  const auto noise = equivalent_noise(ch, alloc, occ);
  return closed_form_cellular_capacity(ch, alloc, noise, graph) + d2d_capacity(ch, alloc, graph, occ);
}

/// The same quantity from the factor form: log2(prod g / prod f). Needs
/// strictly positive powers.
inline double sum_rate_from_factors(const P2Problem& p2, const PowerAllocation& alloc) {
  const Eigen::VectorXd x = p2.pack(alloc);
  const Eigen::VectorXd logx = x.array().log().matrix();
  double nats = 0.0;
  for (std::size_t i = 0; i < p2.denominatorFactors.size(); ++i)
    nats += p2.denominatorFactors[i].log_eval_at_log(logx) - p2.numeratorFactors[i].log_eval_at_log(logx);
  return nats / std::log(2.0);
}

struct IterationRecord {
  PowerAllocation powers;
  double sumRateBits = 0.0;
  double candidateSumRateBits = 0.0;  // rate at the solver's output before the ascent check
  SolverStatus solverStatus = SolverStatus::optimal;
  bool accepted = true;
  std::vector<BarrierStep> solverTrace;
};

struct IterationTrace {
  PowerAllocation start;
  double startSumRateBits = 0.0;
  bool phaseOneUsed = false;
  std::vector<IterationRecord> perIteration;
  bool converged = false;
  int iterationsUsed = 0;
  int rateSettledIteration = 0;  // first step with relative rate change < 1e-6; 0 if none

  const PowerAllocation& final_powers() const { return perIteration.empty() ? start : perIteration.back().powers; }
  double final_sum_rate() const { return perIteration.empty() ? startSumRateBits : perIteration.back().sumRateBits; }
};

/// First step (one-based) whose sum rate is within `rel` of the final rate;
/// 0 for an empty trace.
inline int first_iteration_within(const IterationTrace& tr, double rel) {
  const double fin = tr.final_sum_rate();
  for (std::size_t i = 0; i < tr.perIteration.size(); ++i)
    if (std::abs(tr.perIteration[i].sumRateBits - fin) <= rel * std::abs(fin)) return static_cast<int>(i) + 1;
  return 0;
}

/// Starting point: half of each cap, the cellular half split evenly over the
/// user's d_f subcarriers.
inline PowerAllocation initial_allocation(const ScenarioConfig& cfg, const FactorGraph& graph, int pairs) {
  auto a = PowerAllocation::zeros(graph.users(), graph.subcarriers(), pairs);
  const double perTone = cfg.cellular_cap_w() / (2.0 * graph.user_degree());
  for (int j = 0; j < graph.users(); ++j)
    for (int k = 0; k < graph.subcarriers(); ++k)
      if (graph.active(k, j)) a.cellular(j, k) = perTone;
  a.d2d.setConstant(cfg.d2d_cap_w() / 2.0);
  return a;
}

/// Iterative condensation: condense the expanded denominator at the current
/// point, solve the resulting GP, repeat. A step is accepted only when the
/// true sum rate does not decrease, which makes the recorded trace monotone
/// even when the solver's finite gap would allow a rounding-level drop.
/// Stops after `tMax` steps or once the relative rate change is below 1e-6
/// and no power moved by more than 1e-5 relative. The rate usually settles a
/// few steps before weakly coupled powers do; `rateSettledIteration` records
/// the former.
///
/// Throws InfeasibleProblem when the SINR floors cannot be met.
inline IterationTrace allocate(const ScenarioConfig& cfg, const ChannelRealization& ch, const FactorGraph& graph,
                               const Occupancy& occ, int tMax = 10, const SolverSettings& settings = {}) {
  if (tMax < 1) throw DomainError("allocate: tMax must be >= 1");
  const P2Problem p2 = build_p2(cfg, ch, graph, occ);
  const Posynomial numerator = expand_numerator(p2);
  const Posynomial denominator = expand_denominator(p2);
  const ConvexFormProblem feasibility = to_convex_form(numerator, p2.constraints);

  IterationTrace trace;
  trace.start = initial_allocation(cfg, graph, occ.pairs());
  Eigen::VectorXd x = p2.pack(trace.start);
  if (!(feasibility.max_constraint(x.array().log().matrix()) < 0.0)) {
    const auto ph = find_feasible(feasibility, settings, Eigen::VectorXd(x.array().log().matrix()));
    if (!ph.feasible) {
      if (ph.status == SolverStatus::maxIterations) throw SolverFailure("allocate: phase 1 did not finish");
      throw InfeasibleProblem("allocate: SINR floors cannot be met for this channel", ph.bestSlack);
    }
    x = ph.y.array().exp();
    trace.start = p2.unpack(x);
    trace.phaseOneUsed = true;
  }
  trace.startSumRateBits = sum_rate(ch, graph, occ, trace.start);

  double rate = trace.startSumRateBits;
  for (int it = 0; it < tMax; ++it) {
    const Monomial approx = condense(denominator, x);
    ConvexFormProblem gp = feasibility;
    gp.objective = to_convex_form(numerator * approx.inverse(), {}).objective;
    const SolverResult r = solve(gp, x.array().log().matrix(), settings);
    if (r.status == SolverStatus::infeasible) throw SolverFailure("allocate: GP step lost feasibility");

    IterationRecord rec;
    rec.solverStatus = r.status;
    rec.solverTrace = r.trace;
    const PowerAllocation candidate = p2.unpack(r.x);
    rec.candidateSumRateBits = sum_rate(ch, graph, occ, candidate);
    rec.accepted = rec.candidateSumRateBits >= rate && gp.max_constraint(r.y) <= 1e-8;
    const double move = rec.accepted ? ((r.x - x).array().abs() / x.array()).maxCoeff() : 0.0;
    if (rec.accepted) {
      x = r.x;
      rec.powers = candidate;
      rec.sumRateBits = rec.candidateSumRateBits;
    } else {
      rec.powers = trace.final_powers();
      rec.sumRateBits = rate;
    }
    trace.perIteration.push_back(rec);
    trace.iterationsUsed = it + 1;

    const double change = std::abs(rec.sumRateBits - rate) / std::max(std::abs(rate), 1e-300);
    rate = rec.sumRateBits;
    if (change < 1e-6 && trace.rateSettledIteration == 0) trace.rateSettledIteration = it + 1;
    if (!rec.accepted || (change < 1e-6 && move <= 1e-5)) {
      trace.converged = true;
      break;
    }
  }

  // The per-subcarrier cap implies the per-user total cap.
  const PowerAllocation& fin = trace.final_powers();
  for (int j = 0; j < graph.users(); ++j)
    if (fin.cellular.row(j).sum() > cfg.cellular_cap_w() * (1.0 + 1e-9))
      throw SolverFailure("allocate: per-user power cap violated");
  return trace;
}

struct BaselineDraw {
  PowerAllocation powers;
  bool feasible = false;
  int draws = 0;
};

/// Random allocation: P_jk uniform on (0, P_0/d_f], P'_l uniform on (0, P'_0],
/// redrawn until the SINR floors hold or `maxResample` draws are spent. In the
/// latter case the draw with the smallest worst-case floor violation is
/// returned with `feasible` unset. Non-positive caps give all-zero powers.
template <typename Rng = RandomStream>
BaselineDraw random_baseline(const ScenarioConfig& cfg, const ChannelRealization& ch, const FactorGraph& graph,
                             const Occupancy& occ, Rng& rng, int maxResample = 1000) {
  BaselineDraw out;
  out.powers = PowerAllocation::zeros(graph.users(), graph.subcarriers(), occ.pairs());
  const double perTone = cfg.cellular_cap_w() / graph.user_degree();
  const double d2dCap = cfg.d2d_cap_w();
  if (!(perTone > 0.0) || (occ.pairs() > 0 && !(d2dCap > 0.0))) return out;

  const double gc = cfg.cellular_sinr_floor();
  const double gd = cfg.d2d_sinr_floor();
  const auto sets = incidence_sets(graph);
  double bestViolation = std::numeric_limits<double>::infinity();
  for (int draw = 0; draw < std::max(maxResample, 1); ++draw) {
    auto a = PowerAllocation::zeros(graph.users(), graph.subcarriers(), occ.pairs());
    for (int j = 0; j < graph.users(); ++j)
      for (int k : sets.zeta[static_cast<std::size_t>(j)]) a.cellular(j, k) = perTone * rng.uniform_open_closed();
    for (int l = 0; l < occ.pairs(); ++l) a.d2d[l] = d2dCap * rng.uniform_open_closed();

    // Worst ratio floor / SINR over all links; <= 1 means every floor holds.
    const auto noise = equivalent_noise(ch, a, occ);
    double violation = 0.0;
    for (int j = 0; j < graph.users(); ++j)
      for (int k : sets.zeta[static_cast<std::size_t>(j)])
        violation = std::max(violation, gc / cellular_sinr(ch, a, noise, graph, j, k));
    for (int l = 0; l < occ.pairs(); ++l) violation = std::max(violation, gd / d2d_sinr(ch, a, graph, l, occ));

    out.draws = draw + 1;
    if (violation < bestViolation) {
      bestViolation = violation;
      out.powers = a;
    }
    if (violation <= 1.0) {
      out.feasible = true;
      return out;
    }
  }
  return out;
}

/// CSV: [seed,]iteration,<var>_W,<var>_dBm,...,sum_rate_bits. Iteration 0 is
/// the starting point.
/// With `bitsPerSecond` the rate column is sum_rate_bps; pass the bandwidth as
/// `rateScale` to the row writer to match.
inline void write_iteration_trace_header(std::ostream& os, const P2Problem& p2, bool withSeed, bool bitsPerSecond = false) {
  if (withSeed) os << "seed,";
  os << "iteration";
  for (const auto& n : p2.registry->names()) os << ',' << n << "_W," << n << "_dBm";
  os << (bitsPerSecond ? ",sum_rate_bps\n" : ",sum_rate_bits\n");
}

inline void write_iteration_trace_rows(std::ostream& os, const P2Problem& p2, const IterationTrace& trace,
                                       std::optional<std::uint64_t> seed = std::nullopt, double rateScale = 1.0) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  auto row = [&](int it, const PowerAllocation& a, double rate) {
    if (seed) os << *seed << ',';
    os << it;
    const Eigen::VectorXd x = p2.pack(a);
    for (Eigen::Index v = 0; v < x.size(); ++v) os << ',' << x[v] << ',' << watts_to_dbm(x[v]);
    os << ',' << rate * rateScale << '\n';
  };
  row(0, trace.start, trace.startSumRateBits);
  for (std::size_t i = 0; i < trace.perIteration.size(); ++i)
    row(static_cast<int>(i) + 1, trace.perIteration[i].powers, trace.perIteration[i].sumRateBits);
  os.precision(old);
}

inline void write_iteration_trace_csv(std::ostream& os, const P2Problem& p2, const IterationTrace& trace) {
  write_iteration_trace_header(os, p2, false);
  write_iteration_trace_rows(os, p2, trace);
}

}  // namespace scmad2d

#endif  // SCMAD2D_POWER_ALLOCATOR_HPP
