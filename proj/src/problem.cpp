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

#include "arattack/problem.hpp"

#include <string>

namespace arattack {

AttackProblem::AttackProblem(Dynamics dynamics_in, CompanionMatrix forecaster_in,
                             AttackPattern pattern_in, TargetSchedule targets_in,
                             double lambda_in, int horizon_in, StateVector x0_in)
    : dynamics(std::move(dynamics_in)),
      forecaster(std::move(forecaster_in)),
      pattern(std::move(pattern_in)),
      targets(std::move(targets_in)),
      lambda(lambda_in),
      horizon(horizon_in),
      x0(std::move(x0_in)) {}

void AttackProblem::validate() const {
  if (!(lambda > 0.0)) throw Error(ErrorKind::kDomain, "lambda must be positive");
  if (horizon < 2) throw Error(ErrorKind::kDomain, "horizon must be >= 2");
  if (start < 0 || last_state() <= start || last_state() > horizon) {
    throw Error(ErrorKind::kDomain, "window [" + std::to_string(start) + ", " +
                                        std::to_string(last_state()) + "] outside horizon");
  }
  if (forecaster.size() != x0.size()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "forecaster is " + std::to_string(forecaster.size()) + "-dimensional, state is " +
                    std::to_string(x0.size()));
  }
  if (dynamics.order() > dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "dynamics order exceeds state dimension");
  }
  targets.check_covers(pattern);
}

AttackProblem AttackProblem::window(int s, int e, const StateVector& x) const {
  AttackProblem w = *this;
  w.start = s;
  w.end = e;
  w.x0 = x;
  return w;
}

std::vector<StateVector> nominal_rollout(const AttackProblem& problem,
                                         std::span<const double> controls) {
  std::vector<StateVector> xs;
  xs.reserve(controls.size() + 1);
  xs.push_back(problem.x0);
  for (double u : controls) xs.push_back(step(problem.dynamics, xs.back(), u, 0.0));
  return xs;
}

double deterministic_cost(const AttackProblem& problem, std::span<const double> controls) {
  const auto xs = nominal_rollout(problem, controls);
  CompanionPowers powers(problem.forecaster);
  double cost = 0.0;
  for (int i = 1; i < static_cast<int>(xs.size()); ++i) {
    const int t = problem.start + i;
    for (const ForecastTerm& term :
         forecast_terms(powers, problem.pattern, problem.targets, t, problem.horizon)) {
      const double miss = term.row.dot(xs[i].values()) - term.target;
      cost += term.beta * miss * miss;
    }
  }
  for (double u : controls) cost += problem.lambda * u * u;
  return cost;
}

}  // namespace arattack
