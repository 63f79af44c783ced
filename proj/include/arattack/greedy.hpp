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

// Myopic baseline: u_t minimizes only the instantaneous cost g_t, i.e. the
// control penalty plus the tracking terms of the forecasts made at t+1.

#include "arattack/problem.hpp"

namespace arattack {

/// Closed-form minimizer of the expected g_t for linear dynamics:
///   u = -sum b (rB)(rAx - y) / (lambda + sum b (rB)^2)
/// over the weighted (t+1, t') pairs, r the forecast row of C^{t'-t-1}.
/// The noise term of the expectation does not depend on u and drops out.
double greedy_linear(const StateVector& x, const CompanionMatrix& A, const InputVector& B,
                     const CompanionMatrix& C, const AttackPattern& pattern,
                     const TargetSchedule& targets, double lambda, int t, int horizon);

/// g_t(x, u) with w = 0, for any dynamics.
double greedy_objective(const StateVector& x, double u, const Dynamics& dyn,
                        const CompanionMatrix& C, const AttackPattern& pattern,
                        const TargetSchedule& targets, double lambda, int t, int horizon);

/// Numerical minimizer of greedy_objective(): 401-point grid over [-U, U] with
/// U = 10 (1 + |x_t|), then golden-section search on the bracket around the
/// best grid point down to a 1e-10 interval.
double greedy_nonlinear(const StateVector& x, const Dynamics& dyn, const CompanionMatrix& C,
                        const AttackPattern& pattern, const TargetSchedule& targets,
                        double lambda, int t, int horizon);

/// Picks the closed form for linear dynamics and the numerical path otherwise.
class GreedyController final : public ControlSource {
 public:
  explicit GreedyController(AttackProblem problem);
  double act(int t, const StateVector& x) override;

 private:
  AttackProblem problem_;
};

}  // namespace arattack
