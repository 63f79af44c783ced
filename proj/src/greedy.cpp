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

#include "arattack/greedy.hpp"

#include <cmath>
#include <limits>

namespace arattack {

double greedy_linear(const StateVector& x, const CompanionMatrix& A, const InputVector& B,
                     const CompanionMatrix& C, const AttackPattern& pattern,
                     const TargetSchedule& targets, double lambda, int t, int horizon) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::kDomain, "lambda must be positive");
  if (A.size() != x.size() || C.size() != x.size() || B.vector().size() != x.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "greedy_linear operands");
  }
  CompanionPowers powers(C);
  const Vector ax = A.matrix() * x.values();
  double num = 0.0;
  double den = lambda;
  for (const ForecastTerm& term : forecast_terms(powers, pattern, targets, t + 1, horizon)) {
    const double rb = term.row.dot(B.vector());
    num += term.beta * rb * (term.row.dot(ax) - term.target);
    den += term.beta * rb * rb;
  }
  return num == 0.0 ? 0.0 : -num / den;
}

double greedy_objective(const StateVector& x, double u, const Dynamics& dyn,
                        const CompanionMatrix& C, const AttackPattern& pattern,
                        const TargetSchedule& targets, double lambda, int t, int horizon) {
  CompanionPowers powers(C);
  const auto terms = forecast_terms(powers, pattern, targets, t + 1, horizon);
  double g = lambda * u * u;
  if (terms.empty()) return g;
  const StateVector next = step(dyn, x, u, 0.0);
  for (const ForecastTerm& term : terms) {
    const double miss = term.row.dot(next.values()) - term.target;
    g += term.beta * miss * miss;
  }
  return g;
}

double greedy_nonlinear(const StateVector& x, const Dynamics& dyn, const CompanionMatrix& C,
                        const AttackPattern& pattern, const TargetSchedule& targets,
                        double lambda, int t, int horizon) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::kDomain, "lambda must be positive");
  CompanionPowers powers(C);
  const auto terms = forecast_terms(powers, pattern, targets, t + 1, horizon);
  if (terms.empty()) return 0.0;

  // x_{t+1} = f(lags, u); only row . x_{t+1} matters, and the entries of
  // x_{t+1} past index 1 do not depend on u.
  const Vector& v = x.values();
  const std::span<const double> lags(v.data() + 1, x.dim());
  Vector next(v.size());
  next[0] = 1.0;
  for (int i = 2; i < v.size(); ++i) next[i] = v[i - 1];
  auto g = [&](double u) {
    next[1] = dyn.evaluate(lags, u);
    double s = lambda * u * u;
    for (const ForecastTerm& term : terms) {
      const double miss = term.row.dot(next) - term.target;
      s += term.beta * miss * miss;
    }
    return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
  };

  constexpr int kGrid = 401;
  const double bound = 10.0 * (1.0 + std::abs(x.current()));
  const double spacing = 2.0 * bound / (kGrid - 1);
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    const double val = g(-bound + i * spacing);
    if (val < best_val) {
      best_val = val;
      best = i;
    }
  }
  const double best_u = -bound + best * spacing;

  double lo = -bound + std::max(best - 1, 0) * spacing;
  double hi = -bound + std::min(best + 1, kGrid - 1) * spacing;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_phi * (hi - lo);
  double b = lo + inv_phi * (hi - lo);
  double ga = g(a);
  double gb = g(b);
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    if (ga < gb) {
      hi = b;
      b = a;
      gb = ga;
      a = hi - inv_phi * (hi - lo);
      ga = g(a);
    } else {
      lo = a;
      a = b;
      ga = gb;
      b = lo + inv_phi * (hi - lo);
      gb = g(b);
    }
  }
  const double refined = 0.5 * (lo + hi);
  return g(refined) <= best_val ? refined : best_u;
}

GreedyController::GreedyController(AttackProblem problem) : problem_(std::move(problem)) {
  problem_.validate();
}

double GreedyController::act(int t, const StateVector& x) {
  const AttackProblem& p = problem_;
  if (p.dynamics.is_linear()) {
    return greedy_linear(x, dynamics_matrix(p.dynamics, p.dim()), InputVector(p.dim()),
                         p.forecaster, p.pattern, p.targets, p.lambda, t, p.horizon);
  }
  return greedy_nonlinear(x, p.dynamics, p.forecaster, p.pattern, p.targets, p.lambda, t,
                          p.horizon);
}

}  // namespace arattack
