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

#pragma once

// Lifted-state algebra shared by every solver: AR coefficient vectors, the
// (d+1)x(d+1) companion layout, k-step forecasts, attack-pattern weights and
// realized-cost bookkeeping.
//
// A lifted state is x_t = (1, x_t, x_{t-1}, ..., x_{t-d+1}). The leading 1
// carries the AR intercept through linear algebra, so one companion matrix
// C advances a state by one forecast step and row 1 of C^k x_t is the k-step
// forecast y_{t+k|t}. Models of different orders share the layout by
// zero-padding the shorter coefficient row up to d = max(p, q).

#include <Eigen/Dense>

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "arattack/error.hpp"

namespace arattack {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

/// Intercept plus lag coefficients of an AR(p) recursion
/// x_{t+1} = intercept + sum_i lags[i-1] * x_{t+1-i}.
struct ArCoefficients {
  double intercept = 0.0;
  std::vector<double> lags;

  ArCoefficients() = default;
  ArCoefficients(double intercept, std::vector<double> lags);

  int order() const { return static_cast<int>(lags.size()); }
};

/// (1, x_t, ..., x_{t-d+1}); entry 0 is exactly 1.
class StateVector {
 public:
  explicit StateVector(Vector entries);

  int dim() const { return static_cast<int>(entries_.size()) - 1; }
  int size() const { return static_cast<int>(entries_.size()); }
  double operator[](int i) const { return entries_[i]; }
  /// The current scalar value x_t.
  double current() const { return entries_[1]; }
  const Vector& values() const { return entries_; }

  bool operator==(const StateVector& other) const { return entries_ == other.entries_; }

 private:
  Vector entries_;
};

class CompanionMatrix {
 public:
  /// Order dimension d; the matrix is (d+1)x(d+1).
  int dim() const { return static_cast<int>(data_.rows()) - 1; }
  int size() const { return static_cast<int>(data_.rows()); }
  const Matrix& matrix() const { return data_; }
  double operator()(int i, int j) const { return data_(i, j); }

  /// Wraps a matrix that already has the companion layout; throws otherwise.
  static CompanionMatrix from_matrix(const Matrix& m);

 private:
  explicit CompanionMatrix(Matrix m) : data_(std::move(m)) {}
  friend CompanionMatrix companion_matrix(const ArCoefficients&, int);

  Matrix data_;
};

/// B = (0, 1, 0, ..., 0): the control enters the newest state slot.
class InputVector {
 public:
  explicit InputVector(int dim);

  int dim() const { return static_cast<int>(data_.size()) - 1; }
  const Vector& vector() const { return data_; }

 private:
  Vector data_;
};

CompanionMatrix companion_matrix(const ArCoefficients& coeffs, int dim);

/// `history` is newest first; lags beyond the history are zero.
StateVector lift_state(std::span<const double> history, int dim);

/// y_{t+k|t} = (C^k x)[1]. Throws kDomain for k < 1.
double forecast(const CompanionMatrix& c, const StateVector& x, int k);

/// Memoized powers of one companion matrix. Row 1 of C^k is what every
/// tracking term needs, so that is what gets cached.
class CompanionPowers {
 public:
  explicit CompanionPowers(const CompanionMatrix& c);

  const Matrix& power(int k);
  const RowVector& forecast_row(int k);

 private:
  Matrix base_;
  std::vector<Matrix> powers_;
  std::vector<RowVector> rows_;
};

enum class PatternKind { kTomorrow, kLastDay, kAll, kCustom };

/// Sparse beta weights over (decision time t, forecast time t'), t < t'.
///
/// Keys at t = 0 are accepted because the named patterns are defined for
/// every decision time 0..T-1, but Q_{t'|0} = 0 in the objective: x_0 is given,
/// so every solver and realized_cost() skip decision time 0. The only place
/// those weights matter is the weight_lambda() normalization.
class AttackPattern {
 public:
  using Key = std::pair<int, int>;

  AttackPattern() = default;

  /// beta_{t+1|t} = 1 for first <= t <= T-1.
  static AttackPattern tomorrow(int horizon, int first = 1);
  /// beta_{T|t} = 1 for first <= t <= T-1.
  static AttackPattern last_day(int horizon, int first = 1);
  /// beta_{t'|t} = 1 for first <= t < t' <= T.
  static AttackPattern all(int horizon, int first = 1);

  void set(int t, int t_prime, double beta);
  double weight(int t, int t_prime) const;

  /// (t', beta) for every stored weight at decision time t, in t' order.
  std::vector<std::pair<int, double>> at(int t) const;

  const std::map<Key, double>& entries() const { return weights_; }
  double total_weight() const;
  bool empty() const { return weights_.empty(); }
  PatternKind kind() const { return kind_; }

 private:
  std::map<Key, double> weights_;
  PatternKind kind_ = PatternKind::kCustom;
};

const char* to_string(PatternKind kind);

/// Scalar targets y^dagger_{t'|t}.
class TargetSchedule {
 public:
  using Key = std::pair<int, int>;

  TargetSchedule() = default;

  static TargetSchedule constant(const AttackPattern& pattern, double value);

  void set(int t, int t_prime, double value) { targets_[{t, t_prime}] = value; }
  bool contains(int t, int t_prime) const { return targets_.count({t, t_prime}) > 0; }
  /// Throws kSchedule when (t, t') has no target.
  double at(int t, int t_prime) const;

  const std::map<Key, double>& entries() const { return targets_; }

  /// Throws kSchedule if some positively weighted pair has no target.
  void check_covers(const AttackPattern& pattern) const;

 private:
  std::map<Key, double> targets_;
};

/// One weighted tracking term beta * (row . x_t - target)^2 at decision time t.
struct ForecastTerm {
  int t_prime;
  double beta;
  double target;
  RowVector row;  // row 1 of C^{t'-t}
};

/// All tracking terms attached to decision time t, restricted to t' <= horizon.
/// Decision time 0 never carries terms.
std::vector<ForecastTerm> forecast_terms(CompanionPowers& powers, const AttackPattern& pattern,
                                         const TargetSchedule& targets, int t, int horizon);

/// lambda = lambda_tilde * (sum of stored beta) / T.
double weight_lambda(double lambda_tilde, const AttackPattern& pattern, int horizon);

struct CostReport {
  double tracking_cost = 0.0;
  double control_cost = 0.0;
  double total = 0.0;
};

struct Trajectory {
  std::vector<StateVector> states;  // x_0..x_T
  std::vector<double> controls;     // u_0..u_{T-1}
  std::vector<double> noises;       // w_0..w_{T-1}
  std::map<std::pair<int, int>, double> forecasts;

  int horizon() const { return static_cast<int>(controls.size()); }
};

/// Fills traj.forecasts with y_{t'|t} for every weighted pair with t >= 1.
void fill_forecasts(Trajectory& traj, const CompanionMatrix& c, const AttackPattern& pattern);

/// Realized cost of a rollout: weighted squared forecast misses for decision
/// times 1..T-1 plus lambda * sum u_t^2. Recomputes forecasts from the stored
/// states rather than trusting traj.forecasts.
CostReport realized_cost(const Trajectory& traj, const CompanionMatrix& c,
                         const AttackPattern& pattern, const TargetSchedule& targets,
                         double lambda);

}  // namespace arattack
