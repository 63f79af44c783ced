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

// Exact attack for linear environments: finite-horizon stochastic LQR with
// forecast tracking. The value function V_t(z) = z'P_t z + z'q_t + r_t is
// propagated backwards from V_T = 0; each stage adds
//   sum_{t'>t} beta_{t'|t} (row_{t'-t} z - y^dagger_{t'|t})^2,
// with row_k the forecast row of C^k, so any attack pattern (not only
// "tomorrow") is handled by the same recursion.

#include <vector>

#include "arattack/problem.hpp"

namespace arattack {

struct RiccatiState {
  Matrix P;
  Vector q;
  double r = 0.0;
};

/// u = gain . z + offset.
struct AffinePolicy {
  RowVector gain;
  double offset = 0.0;
};

struct LqrSolution {
  int start = 0;
  /// policies[i] acts at time start + i.
  std::vector<AffinePolicy> policies;
  /// values[i] is V at time start + i, for i = 0..policies.size().
  std::vector<RiccatiState> values;

  const AffinePolicy& policy_at(int t) const { return policies.at(t - start); }
  const RiccatiState& value_at_time(int t) const { return values.at(t - start); }
};

/// Backward recursion for a linear-dynamics problem. `noise_variance` only
/// enters r_t (certainty equivalence). Throws kDomain for nonlinear dynamics
/// and kSolverInstability if some P_t stops being PSD.
LqrSolution solve_lqr(const AttackProblem& problem, double noise_variance = 0.0);

double policy_action(const AffinePolicy& policy, const StateVector& x);

/// z'Pz + z'q + r.
double value_at(const RiccatiState& state, const StateVector& z);

enum class RiccatiForm {
  /// A'PA - (A'PB)(B'PA) / (lambda + B'PB)
  kSubtraction,
  /// A'(I + P B B' / lambda)^{-1} P A, solved by LU, never inverted.
  kInversionLemma,
};

/// The control-dependent part of the P update (stage terms excluded).
Matrix riccati_propagate(const Matrix& P, const Matrix& A, const Vector& B, double lambda,
                         RiccatiForm form);

/// Deterministic open-loop rollout of the feedback policies from problem.x0.
std::vector<double> lqr_open_loop(const AttackProblem& problem, const LqrSolution& solution);

}  // namespace arattack
