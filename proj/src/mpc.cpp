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

#include "arattack/mpc.hpp"

#include <algorithm>
#include <string>

namespace arattack {

MpcController::MpcController(AttackProblem problem, int lookahead, IlqrConfig cfg,
                             int first_active)
    : problem_(std::move(problem)),
      lookahead_(lookahead),
      cfg_(cfg),
      first_active_(first_active) {
  if (lookahead_ < 1) throw Error(ErrorKind::kConfig, "MPC lookahead must be >= 1");
  cfg_.validate();
  problem_.validate();
}

int MpcController::window_end(int tau) const {
  return std::min(tau + lookahead_ - 1, problem_.horizon - 2);
}

double MpcController::act(int tau, const StateVector& x) {
  const int T = problem_.horizon;
  if (tau != next_tau_) {
    throw Error(ErrorKind::kDomain, "MPC expected time " + std::to_string(next_tau_) + ", got " +
                                        std::to_string(tau));
  }
  if (tau > T - 1) throw Error(ErrorKind::kExhausted, "MPC called past T-1");
  ++next_tau_;
  if (tau == T - 1 || tau < first_active_) return 0.0;

  const int last = window_end(tau);
  const AttackProblem window = problem_.window(tau, last + 1, x);

  std::vector<double> warm;
  if (!warm_.empty()) warm.assign(warm_.begin() + 1, warm_.end());
  warm.resize(window.num_controls(), 0.0);

  IlqrResult plan = ilqr_solve(window, cfg_, std::move(warm));
  planned_counts_.push_back(static_cast<int>(plan.controls.size()));
  warm_ = plan.controls;
  const double u = plan.controls.front();
  plans_.push_back(std::move(plan));
  return u;
}

}  // namespace arattack
