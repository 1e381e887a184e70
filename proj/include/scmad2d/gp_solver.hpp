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

#ifndef SCMAD2D_GP_SOLVER_HPP
#define SCMAD2D_GP_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "scmad2d/convex_form.hpp"
#include "scmad2d/errors.hpp"

namespace scmad2d {

struct SolverSettings {
  double barrierMu = 10.0;
  double initialT = 1.0;
  double newtonTol = 1e-9;  // on half the squared Newton decrement
  int maxNewton = 500;      // total over all centering steps
  double dualityGapTol = 1e-8;
  double lineSearchBacktrack = 0.5;
  double lineSearchSlope = 0.01;

  void check() const {
    if (!(barrierMu > 1.0)) throw DomainError("barrierMu must exceed 1");
    if (!(initialT > 0.0)) throw DomainError("initialT must be positive");
    if (!(newtonTol > 0.0)) throw DomainError("newtonTol must be positive");
    if (maxNewton < 1) throw DomainError("maxNewton must be positive");
    if (!(dualityGapTol > 0.0)) throw DomainError("dualityGapTol must be positive");
    if (!(lineSearchBacktrack > 0.0 && lineSearchBacktrack < 1.0)) throw DomainError("lineSearchBacktrack must be in (0,1)");
    if (!(lineSearchSlope > 0.0 && lineSearchSlope < 0.5)) throw DomainError("lineSearchSlope must be in (0,0.5)");
  }
};

enum class SolverStatus { optimal, infeasible, maxIterations };

inline const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::optimal: return "optimal";
    case SolverStatus::infeasible: return "infeasible";
    case SolverStatus::maxIterations: return "maxIterations";
  }
  return "unknown";
}

/// One centered point on the barrier path.
struct BarrierStep {
  int outer = 0;
  double t = 0.0;
  double objective = 0.0;  // convex-form objective at the centered point
  double gap = 0.0;        // m / t
};

struct SolverResult {
  Eigen::VectorXd y;
  Eigen::VectorXd x;
  double objectiveValue = 0.0;  // exp(objective(y)), the posynomial value
  SolverStatus status = SolverStatus::maxIterations;
  int newtonStepsUsed = 0;
  double certifiedGap = std::numeric_limits<double>::infinity();
  std::vector<BarrierStep> trace;
};

struct FeasibilityResult {
  bool feasible = false;
  Eigen::VectorXd y;
  double bestSlack = std::numeric_limits<double>::infinity();  // max_i G'_i(y) achieved
  SolverStatus status = SolverStatus::maxIterations;
};

struct ValueGradientHessian {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

/// Analytic derivatives of the log-sum-exp objective.
inline ValueGradientHessian objective_gradient_hessian(const ConvexFormProblem& p, const Eigen::VectorXd& y) {
  p.check();
  if (y.size() != p.numVariables) throw DimensionError("point has the wrong number of variables");
  ValueGradientHessian out;
  out.value = p.objective.derivatives(y, out.gradient, &out.hessian);
  return out;
}

/// CSV of a barrier trace: outer,t,objective,gap.
inline void write_barrier_trace_csv(std::ostream& os, const std::vector<BarrierStep>& trace) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  os << "outer,t,objective,gap\n";
  for (const auto& s : trace) os << s.outer << ',' << s.t << ',' << s.objective << ',' << s.gap << '\n';
  os.precision(old);
}

namespace detail {

// y = offset + basis * z parameterizes the affine equality set.
struct Reduction {
  ConvexFormProblem problem;
  Eigen::VectorXd offset;
  Eigen::MatrixXd basis;
  bool consistent = true;

  Eigen::VectorXd lift(const Eigen::VectorXd& z) const { return offset + basis * z; }
  Eigen::VectorXd project(const Eigen::VectorXd& y) const { return basis.transpose() * (y - offset); }
};

inline LogSumExp reduce_lse(const LogSumExp& f, const Eigen::VectorXd& offset, const Eigen::MatrixXd& basis) {
  return {f.A * basis, f.b + f.A * offset};
}

inline Reduction eliminate_equalities(const ConvexFormProblem& p) {
  Reduction r;
  const int n = p.numVariables;
  if (p.equalities.empty()) {
    r.problem = p;
    r.offset = Eigen::VectorXd::Zero(n);
    r.basis = Eigen::MatrixXd::Identity(n, n);
    return r;
  }
  const auto T = static_cast<Eigen::Index>(p.equalities.size());
  Eigen::MatrixXd aeq(T, n);
  Eigen::VectorXd rhs(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    aeq.row(t) = p.equalities[static_cast<std::size_t>(t)].a.transpose();
    rhs[t] = -p.equalities[static_cast<std::size_t>(t)].b;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(aeq, Eigen::ComputeFullU | Eigen::ComputeFullV);
  svd.setThreshold(1e-12);
  const Eigen::Index rank = svd.rank();
  r.offset = svd.solve(rhs);
  r.consistent = (aeq * r.offset - rhs).norm() <= 1e-9 * std::max(1.0, rhs.norm());
  r.basis = svd.matrixV().rightCols(n - rank);

  r.problem.numVariables = static_cast<int>(n - rank);
  r.problem.objective = reduce_lse(p.objective, r.offset, r.basis);
  for (const auto& g : p.inequalities) r.problem.inequalities.push_back(reduce_lse(g, r.offset, r.basis));
  return r;
}

// Barrier function phi(z) = t f0(z) - sum log(-f_i(z)); +inf outside the
// strict interior.
inline double barrier_value(const ConvexFormProblem& q, double t, const Eigen::VectorXd& z) {
  double v = t * q.objective.value(z);
  for (const auto& g : q.inequalities) {
    const double gi = g.value(z);
    if (!(gi < 0.0)) return std::numeric_limits<double>::infinity();
    v -= std::log(-gi);
  }
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

inline void barrier_derivatives(const ConvexFormProblem& q, double t, const Eigen::VectorXd& z, Eigen::VectorXd& grad,
                                Eigen::MatrixXd& hess) {
  Eigen::VectorXd g;
  Eigen::MatrixXd h;
  q.objective.derivatives(z, g, &h);
  grad = t * g;
  hess = t * h;
  for (const auto& f : q.inequalities) {
    const double fi = f.derivatives(z, g, &h);
    grad += g / (-fi);
    hess += h / (-fi) + (g * g.transpose()) / (fi * fi);
  }
}

// Newton direction with Levenberg-style regularization when Cholesky fails.
inline Eigen::VectorXd newton_direction(const Eigen::MatrixXd& hess, const Eigen::VectorXd& grad) {
  const Eigen::Index n = hess.rows();
  double reg = 0.0;
  const double base = std::max(hess.trace(), 1.0) * 1e-12;
  for (int attempt = 0; attempt < 30; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(hess + reg * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() == Eigen::Success) {
      Eigen::VectorXd d = llt.solve(-grad);
      if (d.allFinite()) return d;
    }
    reg = reg == 0.0 ? base : reg * 10.0;
  }
  return -grad;
}

enum class CenterOutcome { centered, stalled, budgetExhausted, reached };

inline CenterOutcome center(const ConvexFormProblem& q, double t, Eigen::VectorXd& z, const SolverSettings& s,
                            int& newtonSteps, const std::function<bool(const Eigen::VectorXd&)>& reached = {}) {
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  for (;;) {
    barrier_derivatives(q, t, z, grad, hess);
    const Eigen::VectorXd dz = newton_direction(hess, grad);
    const double slope = grad.dot(dz);
    const double phi0 = barrier_value(q, t, z);
    // Below the rounding resolution of phi a decrease cannot be verified, so
    // the point is as centered as double precision allows.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(phi0));
    if (-slope / 2.0 <= std::max(s.newtonTol, floor)) return CenterOutcome::centered;
    if (newtonSteps >= s.maxNewton) return CenterOutcome::budgetExhausted;
    ++newtonSteps;

    double step = 1.0;
    bool moved = false;
    while (step > 1e-20) {
      const Eigen::VectorXd trial = z + step * dz;
      const double phi = barrier_value(q, t, trial);
      if (phi <= phi0 + s.lineSearchSlope * step * slope) {
        z = trial;
        moved = true;
        break;
      }
      step *= s.lineSearchBacktrack;
    }
    if (!moved) return CenterOutcome::stalled;
    if (reached && reached(z)) return CenterOutcome::reached;
  }
}

// Sequential barrier minimization from a strictly feasible z. `stop` is
// consulted after every centering and may end the run early.
inline SolverResult barrier_minimize(const ConvexFormProblem& q, Eigen::VectorXd z, const SolverSettings& s,
                                     const std::function<bool(const Eigen::VectorXd&, double gap)>& stop = {},
                                     const std::function<bool(const Eigen::VectorXd&)>& reached = {}) {
  SolverResult res;
  const auto m = static_cast<double>(q.inequalities.size());
  double t = s.initialT;
  int newtonSteps = 0;
  for (int outer = 0;; ++outer) {
    const CenterOutcome oc = center(q, t, z, s, newtonSteps, reached);
    const double gap = m / t;
    res.trace.push_back({outer, t, q.objective.value(z), gap});
    res.y = z;
    res.newtonStepsUsed = newtonSteps;
    if (oc == CenterOutcome::reached) {
      res.status = SolverStatus::optimal;
      return res;
    }
    if (oc == CenterOutcome::budgetExhausted) {
      res.status = SolverStatus::maxIterations;
      return res;
    }
    // A stalled line search at a tiny gap is the floating-point floor of an
    // already-centered point; the gap bound still holds to rounding.
    if (gap <= s.dualityGapTol || (stop && stop(z, gap))) {
      res.status = SolverStatus::optimal;
      res.certifiedGap = gap;
      return res;
    }
    if (oc == CenterOutcome::stalled && gap <= 1e3 * s.dualityGapTol) {
      res.status = SolverStatus::optimal;
      res.certifiedGap = gap;
      return res;
    }
    t *= s.barrierMu;
  }
}

struct PhaseOneOutcome {
  bool feasible = false;
  Eigen::VectorXd z;
  double slack = std::numeric_limits<double>::infinity();
  SolverStatus status = SolverStatus::maxIterations;
};

// min s  s.t.  f_i(z) - s <= 0,  s >= -1.
inline PhaseOneOutcome phase_one(const ConvexFormProblem& q, const Eigen::VectorXd& z0, const SolverSettings& s) {
  const int n = q.numVariables;
  PhaseOneOutcome out;
  if (q.inequalities.empty()) {
    out.feasible = true;
    out.z = z0;
    out.slack = -std::numeric_limits<double>::infinity();
    out.status = SolverStatus::optimal;
    return out;
  }

  ConvexFormProblem aux;
  aux.numVariables = n + 1;
  aux.objective.A = Eigen::MatrixXd::Zero(1, n + 1);
  aux.objective.A(0, n) = 1.0;
  aux.objective.b = Eigen::VectorXd::Zero(1);
  for (const auto& g : q.inequalities) {
    LogSumExp h;
    h.A.resize(g.A.rows(), n + 1);
    h.A.leftCols(n) = g.A;
    h.A.col(n).setConstant(-1.0);
    h.b = g.b;
    aux.inequalities.push_back(std::move(h));
  }
  LogSumExp floor;
  floor.A = Eigen::MatrixXd::Zero(1, n + 1);
  floor.A(0, n) = -1.0;
  floor.b = Eigen::VectorXd::Constant(1, -1.0);
  aux.inequalities.push_back(std::move(floor));

  Eigen::VectorXd w(n + 1);
  w.head(n) = z0;
  w[n] = std::max(q.max_constraint(z0) + 1.0, 0.0);

  // Done once the slack is comfortably negative, or certified infeasible
  // once the lower bound s - gap is positive. The constraint values are also
  // checked after every Newton step: the auxiliary problem need not be
  // bounded in z, and s can sit near 0 while a centering pass drifts away.
  bool certifiedInfeasible = false;
  const auto res = barrier_minimize(aux, w, s, [&](const Eigen::VectorXd& v, double gap) {
    if (v[n] < -0.5) return true;
    if (v[n] - gap > 0.0) {
      certifiedInfeasible = true;
      return true;
    }
    return false;
  }, [&](const Eigen::VectorXd& v) { return q.max_constraint(v.head(n)) < -0.5; });

  out.z = res.y.head(n);
  out.slack = q.max_constraint(out.z);
  out.feasible = !certifiedInfeasible && out.slack < 0.0;
  out.status = out.feasible ? SolverStatus::optimal
               : (certifiedInfeasible || res.status == SolverStatus::optimal) ? SolverStatus::infeasible
                                                                              : res.status;
  return out;
}

}  // namespace detail

/// Phase 1: minimize the largest constraint value. Returns a strictly
/// feasible point when the minimum is negative, otherwise an infeasibility
/// certificate with the achieved value. `y0` defaults to the origin.
inline FeasibilityResult find_feasible(const ConvexFormProblem& p, const SolverSettings& s,
                                       std::optional<Eigen::VectorXd> y0 = std::nullopt) {
  p.check();
  s.check();
  const auto red = detail::eliminate_equalities(p);
  FeasibilityResult out;
  if (!red.consistent) {
    out.status = SolverStatus::infeasible;
    out.y = red.offset;
    return out;
  }
  const Eigen::VectorXd z0 = y0 ? red.project(*y0) : Eigen::VectorXd::Zero(red.problem.numVariables);
  const auto ph = detail::phase_one(red.problem, z0, s);
  out.feasible = ph.feasible;
  out.y = red.lift(ph.z);
  out.bestSlack = ph.slack;
  out.status = ph.status;
  return out;
}

/// Barrier interior-point solve of a convex-form GP. Runs phase 1 first when
/// `y0` is not strictly feasible.
inline SolverResult solve(const ConvexFormProblem& p, const Eigen::VectorXd& y0, const SolverSettings& s = {}) {
  p.check();
  s.check();
  if (y0.size() != p.numVariables) throw DimensionError("starting point has the wrong number of variables");
  const auto red = detail::eliminate_equalities(p);

  SolverResult res;
  if (!red.consistent) {
    res.status = SolverStatus::infeasible;
    res.y = red.offset;
    res.x = res.y.array().exp();
    return res;
  }

  Eigen::VectorXd z = red.project(y0);
  if (!(red.problem.max_constraint(z) < 0.0)) {
    const auto ph = detail::phase_one(red.problem, z, s);
    if (!ph.feasible) {
      res.status = ph.status == SolverStatus::maxIterations ? SolverStatus::maxIterations : SolverStatus::infeasible;
      res.y = red.lift(ph.z);
      res.x = res.y.array().exp();
      return res;
    }
    z = ph.z;
  }

  res = detail::barrier_minimize(red.problem, z, s);
  res.y = red.lift(res.y);
  res.x = res.y.array().exp();
  res.objectiveValue = std::exp(p.objective.value(res.y));
  return res;
}

}  // namespace scmad2d

#endif  // SCMAD2D_GP_SOLVER_HPP
