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

// Black-box attack: watch the environment and the forecaster, fit linear AR(p)
// models to a rolling window by least squares, and run LQR on the fitted
// models inside a receding horizon.

#include <deque>
#include <functional>
#include <vector>

#include "arattack/lqr.hpp"

namespace arattack {

/// Most recent b + p states x_{t-b-p+1}..x_t, the b controls u_{t-b}..u_{t-1}
/// and the b + 1 tomorrow-forecasts y_{s+1|s}, s = t-b..t.
class RollingBuffer {
 public:
  RollingBuffer(int capacity, int order);

  /// Records x_t and the forecast y_{t+1|t} observed with it. Times must be
  /// consecutive.
  void observe(int t, double x, double tomorrow_forecast);
  /// Records u_t. Must follow observe(t, ...).
  void record_control(int t, double u);

  int capacity() const { return capacity_; }
  int order() const { return order_; }
  /// Time of the newest state, -1 before the first observation.
  int now() const { return now_; }
  bool full() const;

  const std::deque<double>& states() const { return states_; }
  const std::deque<double>& controls() const { return controls_; }
  const std::deque<double>& forecasts() const { return forecasts_; }

 private:
  int capacity_;
  int order_;
  int now_ = -1;
  int last_control_ = -1;
  std::deque<double> states_;
  std::deque<double> controls_;
  std::deque<double> forecasts_;
};

/// Which forecasts y_{t'|t} the attacker can see. Only tomorrow-visibility
/// (t' = t + 1) can be fitted by ordinary least squares.
class VisibilityPattern {
 public:
  static VisibilityPattern tomorrow();
  static VisibilityPattern custom(std::function<bool(int, int)> visible);

  bool visible(int t, int t_prime) const;
  bool is_tomorrow_only() const { return tomorrow_only_; }

 private:
  std::function<bool(int, int)> visible_;
  bool tomorrow_only_ = false;
};

struct EstimatedModels {
  ArCoefficients a_hat;  // environment
  ArCoefficients c_hat;  // forecaster
};

/// Least-squares fit of a_0 + sum a_i x_{s+1-i} + u_s = x_{s+1} over the b
/// buffered transitions. Rank-deficient designs get the least-norm solution
/// (singular values below 1e-10 of the largest are dropped).
ArCoefficients estimate_env(const RollingBuffer& buffer, int order);

/// Least-squares fit of y_{s+1|s} on (1, x_s, ..., x_{s-p+1}) over the b + 1
/// buffered forecasts. Throws kUnsupportedPattern unless `vis` is tomorrow-only.
ArCoefficients estimate_forecaster(const RollingBuffer& buffer, int order,
                                   const VisibilityPattern& vis);

/// Least-squares AR(p) fit of a plain series, oldest value first. Without
/// `intercept` the fit is through the origin and the returned intercept is 0.
ArCoefficients fit_ar(std::span<const double> series, int order, bool intercept = true);

/// One receding-horizon LQR step on given linear models: solves the
/// horizon-min(t+l+1, T)-t problem starting at t and returns phi_t(x).
double receding_lqr_action(const ArCoefficients& env, const ArCoefficients& forecaster,
                           const AttackPattern& pattern, const TargetSchedule& targets,
                           double lambda, int horizon, int lookahead, int t,
                           const StateVector& x);

struct SysidConfig {
  int order = 3;      // p
  int buffer = 15;    // b
  int lookahead = 5;  // l
};

/// Passive for t = 0..b+p-2, then re-estimates both models every step and
/// plays receding_lqr_action() on them. The forecaster is seen only through
/// `observe_forecast`, which returns y_{t+1|t} for the true state.
class SysidController final : public ControlSource {
 public:
  SysidController(SysidConfig cfg, AttackPattern pattern, TargetSchedule targets, double lambda,
                  int horizon, std::function<double(const StateVector&)> observe_forecast);

  double act(int t, const StateVector& x) override;

  int passive_steps() const { return cfg_.buffer + cfg_.order - 1; }
  /// Steps where LQR on the estimates failed and 0 was played instead.
  int fallbacks() const { return fallbacks_; }
  const std::vector<EstimatedModels>& estimates() const { return estimates_; }

 private:
  SysidConfig cfg_;
  AttackPattern pattern_;
  TargetSchedule targets_;
  double lambda_;
  int horizon_;
  std::function<double(const StateVector&)> observe_forecast_;
  RollingBuffer buffer_;
  std::vector<double> history_;  // newest last
  std::vector<EstimatedModels> estimates_;
  int fallbacks_ = 0;
};

}  // namespace arattack
