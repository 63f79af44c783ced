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

#include <optional>
#include <vector>

#include "arattack/problem.hpp"

namespace arattack {

/// First-order expansion of F around (x, u, w = 0).
struct Linearization {
  Matrix dx;  // (d+1)x(d+1): row 0 zero, row 1 = df/dx_{t-i}, shift rows below
  Vector du;  // (d+1): df/du at entry 1, zero elsewhere
};

enum class JacobianMode { kAnalytic, kFiniteDifference };

struct IlqrConfig {
  int maxiter = 1000;
  /// Stop when mean squared delta-u falls below this.
  double tol = 1e-4;
  JacobianMode jacobian = JacobianMode::kAnalytic;
  double fd_step = 1e-6;

  void validate() const;
};

Linearization linearize(const Dynamics& dyn, const StateVector& x, double u);
/// Central differences with step h on every scalar input of f.
Linearization linearize_fd(const Dynamics& dyn, const StateVector& x, double u, double h);

enum class IlqrExit { kConverged, kMaxIter, kCostGuard };

struct IlqrResult {
  /// Planned controls u_start..u_{last_state-1}.
  std::vector<double> controls;
  int iterations = 0;  // delta-u updates applied
  IlqrExit exit = IlqrExit::kMaxIter;
  double last_step_msq = 0.0;
  double cost = 0.0;  // deterministic cost of `controls`
};

/// Iterative LQR on the noise-free window problem. Each iteration rolls out
/// the nominal controls, linearizes, solves the tracking LQR on the deltas
/// and applies the full delta-u step. Stops when the mean squared delta-u
/// is below cfg.tol, after cfg.maxiter updates, or after five consecutive
/// cost increases (returning the cheapest iterate seen).
IlqrResult ilqr_solve(const AttackProblem& problem, const IlqrConfig& cfg,
                      std::optional<std::vector<double>> warm_start = std::nullopt);

}  // namespace arattack
