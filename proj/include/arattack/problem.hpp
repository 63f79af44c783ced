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

#include "arattack/core.hpp"
#include "arattack/environment.hpp"

namespace arattack {

/// The tuple (F, C, targets, pattern, lambda, T) plus the known state it starts from.
///
/// A problem may describe a sub-window of the full attack: the state `x0` is
/// observed at time `start`, controls u_start..u_{end-1} are chosen, and the
/// tracking terms of decision times start+1..end are charged (decision time
/// `start` contributes nothing because its state is already fixed). Forecast
/// times t' reach up to `horizon` regardless of `end`.
struct AttackProblem {
  Dynamics dynamics;
  CompanionMatrix forecaster;
  AttackPattern pattern;
  TargetSchedule targets;
  double lambda;
  int horizon;
  StateVector x0;
  int start = 0;
  int end = -1;  // -1 means horizon

  AttackProblem(Dynamics dynamics, CompanionMatrix forecaster, AttackPattern pattern,
                TargetSchedule targets, double lambda, int horizon, StateVector x0);

  int last_state() const { return end < 0 ? horizon : end; }
  int num_controls() const { return last_state() - start; }
  int dim() const { return x0.dim(); }

  /// Throws on any inconsistency (dimensions, lambda, horizon, missing targets).
  void validate() const;

  /// Copy restricted to [start, end] with a new initial state.
  AttackProblem window(int start, int end, const StateVector& x) const;
};

/// Noise-free cost of an open-loop control sequence: tracking terms of decision
/// times start+1..last_state() plus lambda * sum u^2.
double deterministic_cost(const AttackProblem& problem, std::span<const double> controls);

/// Noise-free states x_start..x_{start+controls.size()}.
std::vector<StateVector> nominal_rollout(const AttackProblem& problem,
                                         std::span<const double> controls);

}  // namespace arattack
