/*
 * Copyright 2026 The arattack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "arattack/core.hpp"

#include <cmath>
#include <string>

namespace arattack {

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

std::string key_string(int t, int t_prime) {
  return "(" + std::to_string(t) + ", " + std::to_string(t_prime) + ")";
}

}  // namespace

ArCoefficients::ArCoefficients(double intercept_in, std::vector<double> lags_in)
    : intercept(intercept_in), lags(std::move(lags_in)) {
  if (lags.empty()) throw Error(ErrorKind::kDomain, "AR order must be at least 1");
  if (!std::isfinite(intercept) || !all_finite(lags)) {
    throw Error(ErrorKind::kDomain, "AR coefficients must be finite");
  }
}

StateVector::StateVector(Vector entries) : entries_(std::move(entries)) {
  if (entries_.size() < 2) throw Error(ErrorKind::kDimensionMismatch, "state needs length >= 2");
  if (entries_[0] != 1.0) throw Error(ErrorKind::kDomain, "state entry 0 must be exactly 1");
}

CompanionMatrix companion_matrix(const ArCoefficients& coeffs, int dim) {
  if (coeffs.order() < 1) throw Error(ErrorKind::kDomain, "AR order must be at least 1");
  if (dim < coeffs.order()) {
    throw Error(ErrorKind::kOrderOverflow, "model order " + std::to_string(coeffs.order()) +
                                               " exceeds dimension " + std::to_string(dim));
  }
  Matrix m = Matrix::Zero(dim + 1, dim + 1);
  m(0, 0) = 1.0;
  m(1, 0) = coeffs.intercept;
  for (int i = 0; i < coeffs.order(); ++i) m(1, i + 1) = coeffs.lags[i];
  for (int i = 2; i <= dim; ++i) m(i, i - 1) = 1.0;
  return CompanionMatrix(std::move(m));
}

CompanionMatrix CompanionMatrix::from_matrix(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 2) {
    throw Error(ErrorKind::kDimensionMismatch, "companion matrix must be square, size >= 2");
  }
  const int d = static_cast<int>(m.rows()) - 1;
  std::vector<double> lags(d);
  for (int i = 0; i < d; ++i) lags[i] = m(1, i + 1);
  CompanionMatrix c = companion_matrix(ArCoefficients(m(1, 0), std::move(lags)), d);
  if (c.matrix() != m) throw Error(ErrorKind::kDomain, "matrix is not in companion layout");
  return c;
}

InputVector::InputVector(int dim) : data_(Vector::Zero(dim + 1)) {
  if (dim < 1) throw Error(ErrorKind::kDimensionMismatch, "input vector needs dim >= 1");
  data_[1] = 1.0;
}

StateVector lift_state(std::span<const double> history, int dim) {
  Vector v = Vector::Zero(dim + 1);
  v[0] = 1.0;
  const int n = std::min<int>(dim, static_cast<int>(history.size()));
  for (int i = 0; i < n; ++i) v[i + 1] = history[i];
  return StateVector(std::move(v));
}

double forecast(const CompanionMatrix& c, const StateVector& x, int k) {
  if (k < 1) throw Error(ErrorKind::kDomain, "forecast step must be >= 1");
  if (c.size() != x.size()) throw Error(ErrorKind::kDimensionMismatch, "forecast: C vs x");
  Vector y = x.values();
  for (int i = 0; i < k; ++i) y = c.matrix() * y;
  return y[1];
}

CompanionPowers::CompanionPowers(const CompanionMatrix& c) : base_(c.matrix()) {
  powers_.push_back(Matrix::Identity(base_.rows(), base_.cols()));
  rows_.push_back(powers_.back().row(1));
}

const Matrix& CompanionPowers::power(int k) {
  if (k < 0) throw Error(ErrorKind::kDomain, "negative matrix power");
  while (static_cast<int>(powers_.size()) <= k) {
    powers_.push_back(base_ * powers_.back());
    rows_.push_back(powers_.back().row(1));
  }
  return powers_[k];
}

const RowVector& CompanionPowers::forecast_row(int k) {
  power(k);
  return rows_[k];
}

AttackPattern AttackPattern::tomorrow(int horizon, int first) {
  AttackPattern p;
  for (int t = first; t <= horizon - 1; ++t) p.set(t, t + 1, 1.0);
  p.kind_ = PatternKind::kTomorrow;
  return p;
}

AttackPattern AttackPattern::last_day(int horizon, int first) {
  AttackPattern p;
  for (int t = first; t <= horizon - 1; ++t) p.set(t, horizon, 1.0);
  p.kind_ = PatternKind::kLastDay;
  return p;
}

AttackPattern AttackPattern::all(int horizon, int first) {
  AttackPattern p;
  for (int t = first; t <= horizon - 1; ++t) {
    for (int tp = t + 1; tp <= horizon; ++tp) p.set(t, tp, 1.0);
  }
  p.kind_ = PatternKind::kAll;
  return p;
}

void AttackPattern::set(int t, int t_prime, double beta) {
  if (t < 0 || t_prime <= t) {
    throw Error(ErrorKind::kDomain, "pattern key " + key_string(t, t_prime) + " needs 0 <= t < t'");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw Error(ErrorKind::kDomain, "pattern weight must lie in [0, 1]");
  }
  kind_ = PatternKind::kCustom;
  if (beta == 0.0) {
    weights_.erase({t, t_prime});
  } else {
    weights_[{t, t_prime}] = beta;
  }
}

double AttackPattern::weight(int t, int t_prime) const {
  auto it = weights_.find({t, t_prime});
  return it == weights_.end() ? 0.0 : it->second;
}

std::vector<std::pair<int, double>> AttackPattern::at(int t) const {
  std::vector<std::pair<int, double>> out;
  for (auto it = weights_.lower_bound({t, t + 1}); it != weights_.end() && it->first.first == t;
       ++it) {
    out.emplace_back(it->first.second, it->second);
  }
  return out;
}

double AttackPattern::total_weight() const {
  double s = 0.0;
  for (const auto& [key, beta] : weights_) s += beta;
  return s;
}

const char* to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::kTomorrow: return "tomorrow";
    case PatternKind::kLastDay: return "last_day";
    case PatternKind::kAll: return "all";
    case PatternKind::kCustom: return "custom";
  }
  return "custom";
}

TargetSchedule TargetSchedule::constant(const AttackPattern& pattern, double value) {
  TargetSchedule s;
  for (const auto& [key, beta] : pattern.entries()) s.set(key.first, key.second, value);
  return s;
}

double TargetSchedule::at(int t, int t_prime) const {
  auto it = targets_.find({t, t_prime});
  if (it == targets_.end()) {
    throw Error(ErrorKind::kSchedule, "no target for " + key_string(t, t_prime));
  }
  return it->second;
}

void TargetSchedule::check_covers(const AttackPattern& pattern) const {
  for (const auto& [key, beta] : pattern.entries()) {
    if (key.first >= 1 && !contains(key.first, key.second)) {
      throw Error(ErrorKind::kSchedule, "no target for " + key_string(key.first, key.second));
    }
  }
}

std::vector<ForecastTerm> forecast_terms(CompanionPowers& powers, const AttackPattern& pattern,
                                         const TargetSchedule& targets, int t, int horizon) {
  std::vector<ForecastTerm> terms;
  if (t < 1) return terms;
  for (const auto& [t_prime, beta] : pattern.at(t)) {
    if (t_prime > horizon) continue;
    terms.push_back({t_prime, beta, targets.at(t, t_prime), powers.forecast_row(t_prime - t)});
  }
  return terms;
}

double weight_lambda(double lambda_tilde, const AttackPattern& pattern, int horizon) {
  if (!(lambda_tilde > 0.0)) throw Error(ErrorKind::kDomain, "lambda_tilde must be positive");
  if (horizon < 2) throw Error(ErrorKind::kDomain, "horizon must be >= 2");
  const double total = pattern.total_weight();
  if (total <= 0.0) throw Error(ErrorKind::kZeroWeight, "pattern has no positive weight");
  return lambda_tilde * total / horizon;
}

void fill_forecasts(Trajectory& traj, const CompanionMatrix& c, const AttackPattern& pattern) {
  CompanionPowers powers(c);
  traj.forecasts.clear();
  const int n = static_cast<int>(traj.states.size());
  for (const auto& [key, beta] : pattern.entries()) {
    const auto [t, t_prime] = key;
    if (t < 1 || t >= n) continue;
    traj.forecasts[key] = powers.forecast_row(t_prime - t).dot(traj.states[t].values());
  }
}

CostReport realized_cost(const Trajectory& traj, const CompanionMatrix& c,
                         const AttackPattern& pattern, const TargetSchedule& targets,
                         double lambda) {
  const int horizon = traj.horizon();
  if (static_cast<int>(traj.states.size()) != horizon + 1) {
    throw Error(ErrorKind::kDimensionMismatch, "trajectory states/controls length mismatch");
  }
  CompanionPowers powers(c);
  CostReport report;
  for (const auto& [key, beta] : pattern.entries()) {
    const auto [t, t_prime] = key;
    if (t < 1 || t > horizon - 1 || t_prime > horizon) continue;
    const double y = powers.forecast_row(t_prime - t).dot(traj.states[t].values());
    const double miss = y - targets.at(t, t_prime);
    report.tracking_cost += beta * miss * miss;
  }
  for (double u : traj.controls) report.control_cost += lambda * u * u;
  report.total = report.tracking_cost + report.control_cost;
  return report;
}

}  // namespace arattack
