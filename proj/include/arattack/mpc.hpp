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

#include <vector>

#include "arattack/ilqr.hpp"

namespace arattack {

/// Receding-horizon attacker. At each time tau it plans controls
/// u_tau..u_{L(tau)}, L(tau) = min(tau + l - 1, T - 2), with iLQR on the
/// noise-free system and executes only u_tau.
///
/// The window objective keeps every weighted beta_{t'|t} whose decision time t
/// lies in (tau, L(tau) + 1], even when t' is past the window, so a last-day
/// target stays visible to short windows. Each plan is warm-started from the
/// previous plan shifted left by one step.
class MpcController final : public ControlSource {
 public:
  /// `problem` describes the full attack (start 0, end T). Before
  /// `first_active` the controller observes only and returns 0.
  MpcController(AttackProblem problem, int lookahead, IlqrConfig cfg, int first_active = 0);

  /// Must be called with tau = 0, 1, ... in order. Returns 0 at tau = T-1;
  /// throws kExhausted past it.
  double act(int tau, const StateVector& x) override;

  /// L(tau) - tau + 1 for every planned step so far.
  const std::vector<int>& planned_counts() const { return planned_counts_; }
  const std::vector<IlqrResult>& plans() const { return plans_; }

  int window_end(int tau) const;

 private:
  AttackProblem problem_;
  int lookahead_;
  IlqrConfig cfg_;
  int first_active_;
  int next_tau_ = 0;
  std::vector<double> warm_;
  std::vector<int> planned_counts_;
  std::vector<IlqrResult> plans_;
};

}  // namespace arattack
