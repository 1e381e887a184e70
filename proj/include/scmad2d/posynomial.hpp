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

#ifndef SCMAD2D_POSYNOMIAL_HPP
#define SCMAD2D_POSYNOMIAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "scmad2d/convex_form.hpp"
#include "scmad2d/errors.hpp"

namespace scmad2d {

/// Ordered variable names shared by every term of a problem.
class VariableRegistry {
public:
  explicit VariableRegistry(std::vector<std::string> names) : names_(std::move(names)) {}

  int size() const noexcept { return static_cast<int>(names_.size()); }
  const std::string& name(int i) const { return names_.at(static_cast<std::size_t>(i)); }
  const std::vector<std::string>& names() const noexcept { return names_; }

private:
  std::vector<std::string> names_;
};

using Registry = std::shared_ptr<const VariableRegistry>;

inline Registry make_registry(std::vector<std::string> names) {
  return std::make_shared<const VariableRegistry>(std::move(names));
}

/// x1, x2, ..., xn.
inline Registry make_registry(int n) {
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
  return make_registry(std::move(names));
}

namespace detail {

inline bool same_registry(const Registry& a, const Registry& b) {
  return a == b || (a && b && a->names() == b->names());
}

inline void check_point(const Eigen::VectorXd& x, int n) {
  if (x.size() != n) throw DimensionError("point has the wrong number of variables");
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!(x[i] > 0.0)) throw DomainError("posynomial arguments must be positive");
}

}  // namespace detail

/// c * prod_l x_l^{a_l} with c > 0.
class Monomial {
public:
  Monomial(Registry reg, double coefficient, Eigen::VectorXd exponents)
      : reg_(std::move(reg)), c_(coefficient), a_(std::move(exponents)) {
    if (!reg_) throw DimensionError("monomial needs a registry");
    if (a_.size() != reg_->size()) throw DimensionError("exponent vector does not match the registry");
    if (!(c_ > 0.0) || !std::isfinite(c_)) throw DomainError("monomial coefficient must be positive and finite");
    if (!a_.allFinite()) throw DomainError("monomial exponents must be finite");
  }

  static Monomial constant(Registry reg, double c) {
    const int n = reg->size();
    return {std::move(reg), c, Eigen::VectorXd::Zero(n)};
  }

  /// c * x_i^power.
  static Monomial variable(Registry reg, int i, double power = 1.0, double c = 1.0) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(reg->size());
    a[i] = power;
    return {std::move(reg), c, std::move(a)};
  }

  const Registry& registry() const noexcept { return reg_; }
  double coefficient() const noexcept { return c_; }
  const Eigen::VectorXd& exponents() const noexcept { return a_; }

  /// log c + a^T log x.
  double log_eval_at_log(const Eigen::VectorXd& logx) const { return std::log(c_) + a_.dot(logx); }

  double eval(const Eigen::VectorXd& x) const {
    detail::check_point(x, reg_->size());
    return std::exp(log_eval_at_log(x.array().log().matrix()));
  }

  Monomial operator*(const Monomial& o) const {
    if (!detail::same_registry(reg_, o.reg_)) throw DimensionError("registry mismatch");
    return {reg_, c_ * o.c_, a_ + o.a_};
  }

  Monomial inverse() const { return {reg_, 1.0 / c_, -a_}; }

  Monomial scaled(double s) const { return {reg_, c_ * s, a_}; }

private:
  Registry reg_;
  double c_;
  Eigen::VectorXd a_;
};

/// Sum of monomials over one registry. Terms whose exponent vectors agree to
/// 12 decimal places are merged on construction.
class Posynomial {
public:
  Posynomial(Registry reg, const std::vector<Monomial>& terms) : reg_(std::move(reg)) {
    if (!reg_) throw DimensionError("posynomial needs a registry");
    for (const auto& t : terms) add_term(t);
    if (terms_.empty()) throw DimensionError("posynomial needs at least one term");
  }

  Posynomial(const Monomial& m) : Posynomial(m.registry(), std::vector<Monomial>{m}) {}  // NOLINT

  const Registry& registry() const noexcept { return reg_; }
  const std::vector<Monomial>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }

  double eval(const Eigen::VectorXd& x) const {
    detail::check_point(x, reg_->size());
    double s = 0.0;
    for (const auto& t : terms_) s += t.eval(x);
    return s;
  }

  /// log of the value at x = exp(logx), evaluated with a max shift.
  double log_eval_at_log(const Eigen::VectorXd& logx) const {
    std::vector<double> z;
    z.reserve(terms_.size());
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms_) {
      z.push_back(t.log_eval_at_log(logx));
      m = std::max(m, z.back());
    }
    double s = 0.0;
    for (double v : z) s += std::exp(v - m);
    return m + std::log(s);
  }

  Posynomial operator+(const Posynomial& o) const {
    if (!detail::same_registry(reg_, o.reg_)) throw DimensionError("registry mismatch");
    Posynomial out = *this;
    for (const auto& t : o.terms_) out.add_term(t);
    return out;
  }

  Posynomial operator*(const Monomial& m) const {
    if (!detail::same_registry(reg_, m.registry())) throw DimensionError("registry mismatch");
    std::vector<Monomial> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) out.push_back(t * m);
    return {reg_, out};
  }

  Posynomial operator*(const Posynomial& o) const;

private:
  using Key = std::vector<std::int64_t>;

  static Key key_of(const Eigen::VectorXd& a) {
    Key k(static_cast<std::size_t>(a.size()));
    for (Eigen::Index i = 0; i < a.size(); ++i) k[static_cast<std::size_t>(i)] = std::llround(a[i] * 1e12);
    return k;
  }

  void add_term(const Monomial& t) {
    if (!detail::same_registry(reg_, t.registry())) throw DimensionError("registry mismatch");
    auto [it, inserted] = index_.try_emplace(key_of(t.exponents()), terms_.size());
    if (inserted)
      terms_.push_back(t);
    else
      terms_[it->second] = Monomial(reg_, terms_[it->second].coefficient() + t.coefficient(), terms_[it->second].exponents());
  }

  Registry reg_;
  std::vector<Monomial> terms_;
  std::map<Key, std::size_t> index_;
};

/// Distributed product; equal exponent vectors are merged.
inline Posynomial multiply(const Posynomial& p, const Posynomial& q) {
  if (!detail::same_registry(p.registry(), q.registry())) throw DimensionError("registry mismatch");
  std::vector<Monomial> out;
  out.reserve(p.size() * q.size());
  for (const auto& a : p.terms())
    for (const auto& b : q.terms()) out.push_back(a * b);
  return {p.registry(), out};
}

inline Posynomial Posynomial::operator*(const Posynomial& o) const { return multiply(*this, o); }

/// Weights beta_l = u_l(x0) / g(x0), computed in the log domain. They are
/// positive (up to underflow) and sum to one.
inline std::vector<double> condensation_weights(const Posynomial& g, const Eigen::VectorXd& x0) {
  detail::check_point(x0, g.registry()->size());
  const Eigen::VectorXd logx = x0.array().log().matrix();
  const double logg = g.log_eval_at_log(logx);
  std::vector<double> beta;
  beta.reserve(g.size());
  for (const auto& t : g.terms()) beta.push_back(std::exp(t.log_eval_at_log(logx) - logg));
  return beta;
}

/// Best local monomial under-estimator of g at x0 by the weighted AM-GM
/// inequality: g~(x) = prod_l (u_l(x) / beta_l)^{beta_l} with the weights
/// above. g~(x) <= g(x) everywhere and g~(x0) = g(x0).
inline Monomial condense(const Posynomial& g, const Eigen::VectorXd& x0) {
  const auto beta = condensation_weights(g, x0);
  double logc = 0.0;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(g.registry()->size());
  for (std::size_t l = 0; l < beta.size(); ++l) {
    if (beta[l] <= 0.0) continue;  // underflowed weight: the factor tends to 1
    const auto& u = g.terms()[l];
    logc += beta[l] * (std::log(u.coefficient()) - std::log(beta[l]));
    a += beta[l] * u.exponents();
  }
  const double c = std::exp(logc);
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("condensed coefficient out of double range");
  return {g.registry(), c, std::move(a)};
}

namespace detail {

inline LogSumExp to_log_sum_exp(const Posynomial& p) {
  const int n = p.registry()->size();
  LogSumExp f{Eigen::MatrixXd(static_cast<Eigen::Index>(p.size()), n), Eigen::VectorXd(static_cast<Eigen::Index>(p.size()))};
  for (std::size_t m = 0; m < p.size(); ++m) {
    f.A.row(static_cast<Eigen::Index>(m)) = p.terms()[m].exponents().transpose();
    f.b[static_cast<Eigen::Index>(m)] = std::log(p.terms()[m].coefficient());
  }
  return f;
}

}  // namespace detail

/// Log-variable image of the standard-form GP
///   min G0(x)  s.t.  G_s(x) <= 1,  h_t(x) = 1
/// with y = log x and b = log c.
inline ConvexFormProblem to_convex_form(const Posynomial& objective, const std::vector<Posynomial>& constraints,
                                        const std::vector<Monomial>& equalities = {}) {
  ConvexFormProblem p;
  p.numVariables = objective.registry()->size();
  p.objective = detail::to_log_sum_exp(objective);
  for (const auto& g : constraints) {
    if (!detail::same_registry(objective.registry(), g.registry())) throw DimensionError("registry mismatch");
    p.inequalities.push_back(detail::to_log_sum_exp(g));
  }
  for (const auto& h : equalities) {
    if (!detail::same_registry(objective.registry(), h.registry())) throw DimensionError("registry mismatch");
    p.equalities.push_back({h.exponents(), std::log(h.coefficient())});
  }
  return p;
}

/// "c * x1^a1 * x2^a2" per term, one term per line; zero exponents omitted.
inline void write_posynomial(std::ostream& os, const Posynomial& p) {
  for (const auto& t : p.terms()) {
    os << std::setprecision(12) << t.coefficient();
    for (int i = 0; i < p.registry()->size(); ++i) {
      const double a = t.exponents()[i];
      if (a != 0.0) os << " * " << p.registry()->name(i) << '^' << std::setprecision(12) << a;
    }
    os << '\n';
  }
}

inline std::string to_string(const Posynomial& p) {
  std::ostringstream os;
  write_posynomial(os, p);
  return os.str();
}

}  // namespace scmad2d

#endif  // SCMAD2D_POSYNOMIAL_HPP
