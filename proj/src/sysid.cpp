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

#include "arattack/sysid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace arattack {

namespace {

ArCoefficients least_norm(const Matrix& design, const Vector& rhs) {
  Eigen::JacobiSVD<Matrix> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  const Vector sol = svd.solve(rhs);
  std::vector<double> lags(sol.data() + 1, sol.data() + sol.size());
  return ArCoefficients(sol[0], std::move(lags));
}

template <typename T>
void trim(std::deque<T>& d, std::size_t n) {
  while (d.size() > n) d.pop_front();
}

}  // namespace

RollingBuffer::RollingBuffer(int capacity, int order) : capacity_(capacity), order_(order) {
  if (capacity_ < 1 || order_ < 1) {
    throw Error(ErrorKind::kConfig, "buffer capacity and order must be >= 1");
  }
}

void RollingBuffer::observe(int t, double x, double tomorrow_forecast) {
  if (t != now_ + 1) throw Error(ErrorKind::kDomain, "buffer observations must be consecutive");
  now_ = t;
  states_.push_back(x);
  forecasts_.push_back(tomorrow_forecast);
  trim(states_, capacity_ + order_);
  trim(forecasts_, capacity_ + 1);
}

void RollingBuffer::record_control(int t, double u) {
  if (t != now_) throw Error(ErrorKind::kDomain, "control must follow its observation");
  if (last_control_ == t) {
    throw Error(ErrorKind::kDomain, "control already recorded for t=" + std::to_string(t));
  }
  last_control_ = t;
  controls_.push_back(u);
  trim(controls_, capacity_);
}

bool RollingBuffer::full() const {
  // Before record_control(now) the newest b controls are u_{now-b}..u_{now-1}.
  return static_cast<int>(states_.size()) == capacity_ + order_ &&
         static_cast<int>(controls_.size()) == capacity_ &&
         static_cast<int>(forecasts_.size()) == capacity_ + 1;
}

VisibilityPattern VisibilityPattern::tomorrow() {
  VisibilityPattern v;
  v.visible_ = [](int t, int t_prime) { return t_prime == t + 1; };
  v.tomorrow_only_ = true;
  return v;
}

VisibilityPattern VisibilityPattern::custom(std::function<bool(int, int)> visible) {
  VisibilityPattern v;
  v.visible_ = std::move(visible);
  return v;
}

bool VisibilityPattern::visible(int t, int t_prime) const {
  return t_prime > t && visible_ && visible_(t, t_prime);
}

ArCoefficients estimate_env(const RollingBuffer& buffer, int order) {
  const int b = buffer.capacity();
  if (order != buffer.order()) throw Error(ErrorKind::kDimensionMismatch, "buffer order");
  if (!buffer.full()) throw Error(ErrorKind::kInsufficientData, "buffer is not full");
  const auto& x = buffer.states();
  const auto& u = buffer.controls();
  Matrix design(b, order + 1);
  Vector rhs(b);
  for (int k = 0; k < b; ++k) {
    design(k, 0) = 1.0;
    for (int i = 1; i <= order; ++i) design(k, i) = x[k + order - i];
    rhs[k] = x[k + order] - u[k];
  }
  return least_norm(design, rhs);
}

ArCoefficients estimate_forecaster(const RollingBuffer& buffer, int order,
                                   const VisibilityPattern& vis) {
  if (!vis.is_tomorrow_only()) {
    throw Error(ErrorKind::kUnsupportedPattern, "only tomorrow-visible forecasts can be fitted");
  }
  const int b = buffer.capacity();
  if (order != buffer.order()) throw Error(ErrorKind::kDimensionMismatch, "buffer order");
  if (!buffer.full()) throw Error(ErrorKind::kInsufficientData, "buffer is not full");
  const auto& x = buffer.states();
  const auto& y = buffer.forecasts();
  Matrix design(b + 1, order + 1);
  Vector rhs(b + 1);
  for (int k = 0; k <= b; ++k) {
    design(k, 0) = 1.0;
    for (int i = 1; i <= order; ++i) design(k, i) = x[k + order - i];
    rhs[k] = y[k];
  }
  return least_norm(design, rhs);
}

ArCoefficients fit_ar(std::span<const double> series, int order, bool intercept) {
  const int n = static_cast<int>(series.size()) - order;
  if (order < 1 || n < 1) throw Error(ErrorKind::kInsufficientData, "series too short for AR fit");
  Matrix design(n, order + 1);
  Vector rhs(n);
  for (int k = 0; k < n; ++k) {
    const int s = k + order - 1;
    // A zero column is dropped by the least-norm solve, pinning the intercept at 0.
    design(k, 0) = intercept ? 1.0 : 0.0;
    for (int i = 1; i <= order; ++i) design(k, i) = series[s + 1 - i];
    rhs[k] = series[s + 1];
  }
  return least_norm(design, rhs);
}

double receding_lqr_action(const ArCoefficients& env, const ArCoefficients& forecaster,
                           const AttackPattern& pattern, const TargetSchedule& targets,
                           double lambda, int horizon, int lookahead, int t,
                           const StateVector& x) {
  const int d = x.dim();
  const int window_end = std::min(t + lookahead + 1, horizon);
  AttackProblem problem(Dynamics::linear(env), companion_matrix(forecaster, d), pattern, targets,
                        lambda, window_end, x);
  problem.start = t;
  problem.end = window_end;
  const LqrSolution sol = solve_lqr(problem);
  return policy_action(sol.policies.front(), x);
}

SysidController::SysidController(SysidConfig cfg, AttackPattern pattern, TargetSchedule targets,
                                 double lambda, int horizon,
                                 std::function<double(const StateVector&)> observe_forecast)
    : cfg_(cfg),
      pattern_(std::move(pattern)),
      targets_(std::move(targets)),
      lambda_(lambda),
      horizon_(horizon),
      observe_forecast_(std::move(observe_forecast)),
      buffer_(cfg.buffer, cfg.order) {
  if (cfg_.lookahead < 1) throw Error(ErrorKind::kConfig, "sysid lookahead must be >= 1");
  if (!(lambda_ > 0.0)) throw Error(ErrorKind::kDomain, "lambda must be positive");
}

double SysidController::act(int t, const StateVector& x) {
  if (t > horizon_ - 1) throw Error(ErrorKind::kExhausted, "sysid controller called past T-1");
  history_.push_back(x.current());
  buffer_.observe(t, x.current(), observe_forecast_(x));

  double u = 0.0;
  if (t >= passive_steps()) {
    EstimatedModels est{estimate_env(buffer_, cfg_.order),
                        estimate_forecaster(buffer_, cfg_.order, VisibilityPattern::tomorrow())};
    std::vector<double> newest_first(history_.rbegin(), history_.rend());
    const StateVector z = lift_state(newest_first, cfg_.order);
    try {
      u = receding_lqr_action(est.a_hat, est.c_hat, pattern_, targets_, lambda_, horizon_,
                              cfg_.lookahead, t, z);
    } catch (const Error&) {
      u = std::numeric_limits<double>::quiet_NaN();
    }
    if (!std::isfinite(u)) {
      u = 0.0;
      ++fallbacks_;
    }
    estimates_.push_back(std::move(est));
  }
  buffer_.record_control(t, u);
  return u;
}

}  // namespace arattack
