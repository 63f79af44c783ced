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

#include "arattack/lqr.hpp"

#include <algorithm>
#include <string>

namespace arattack {

namespace {

// Stage contribution of decision time t to (P, q, r).
void add_stage(CompanionPowers& powers, const AttackProblem& problem, int t, Matrix& P, Vector& q,
               double& r) {
  if (t <= problem.start) return;
  for (const ForecastTerm& term :
       forecast_terms(powers, problem.pattern, problem.targets, t, problem.horizon)) {
    P.noalias() += term.beta * term.row.transpose() * term.row;
    q.noalias() -= 2.0 * term.beta * term.target * term.row.transpose();
    r += term.beta * term.target * term.target;
  }
}

void check_psd(const Matrix& P, int t) {
  const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(P, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-8 * scale) {
    throw Error(ErrorKind::kSolverInstability,
                "P_" + std::to_string(t) + " is not positive semi-definite");
  }
}

}  // namespace

Matrix riccati_propagate(const Matrix& P, const Matrix& A, const Vector& B, double lambda,
                         RiccatiForm form) {
  switch (form) {
    case RiccatiForm::kSubtraction: {
      const double den = lambda + B.dot(P * B);
      const Vector apb = A.transpose() * (P * B);
      return A.transpose() * P * A - apb * apb.transpose() / den;
    }
    case RiccatiForm::kInversionLemma: {
      const Eigen::Index n = P.rows();
      const Matrix M = Matrix::Identity(n, n) + (P * B) * B.transpose() / lambda;
      return A.transpose() * M.partialPivLu().solve(P * A);
    }
  }
  return {};
}

LqrSolution solve_lqr(const AttackProblem& problem, double noise_variance) {
  problem.validate();
  if (!problem.dynamics.is_linear()) {
    throw Error(ErrorKind::kDomain, "LQR needs linear dynamics");
  }
  const int d = problem.dim();
  const Matrix A = dynamics_matrix(problem.dynamics, d).matrix();
  const Vector B = InputVector(d).vector();
  const double lambda = problem.lambda;
  CompanionPowers powers(problem.forecaster);

  const int first = problem.start;
  const int last = problem.last_state();
  const int n = last - first;

  LqrSolution sol;
  sol.start = first;
  sol.policies.resize(n);
  sol.values.resize(n + 1);

  Matrix P = Matrix::Zero(d + 1, d + 1);
  Vector q = Vector::Zero(d + 1);
  double r = 0.0;
  add_stage(powers, problem, last, P, q, r);
  sol.values[n] = {P, q, r};

  for (int t = last - 1; t >= first; --t) {
    // B picks entry 1, so B'PB = P(1,1), B'PA = (PA).row(1), B'q = q(1).
    const double pbb = P(1, 1);
    const double den = lambda + pbb;
    if (!(den > 0.0)) throw Error(ErrorKind::kSolverInstability, "lambda + B'PB <= 0");
    const RowVector bpa = P.row(1) * A;
    const double bq = q[1];

    AffinePolicy& pol = sol.policies[t - first];
    pol.gain = -bpa / den;
    pol.offset = -bq / (2.0 * den);

    Matrix P_next = A.transpose() * P * A - bpa.transpose() * bpa / den;
    Vector q_next = A.transpose() * q - bpa.transpose() * (bq / den);
    double r_next = r + pbb * noise_variance - bq * bq / (4.0 * den);
    add_stage(powers, problem, t, P_next, q_next, r_next);

    P = 0.5 * (P_next + P_next.transpose());
    q = std::move(q_next);
    r = r_next;
    check_psd(P, t);
    sol.values[t - first] = {P, q, r};
  }
  return sol;
}

double policy_action(const AffinePolicy& policy, const StateVector& x) {
  if (policy.gain.size() != x.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "policy gain vs state");
  }
  return policy.gain.dot(x.values()) + policy.offset;
}

double value_at(const RiccatiState& state, const StateVector& z) {
  const Vector& v = z.values();
  if (state.P.rows() != v.size()) throw Error(ErrorKind::kDimensionMismatch, "value vs state");
  return v.dot(state.P * v) + v.dot(state.q) + state.r;
}

std::vector<double> lqr_open_loop(const AttackProblem& problem, const LqrSolution& solution) {
  std::vector<double> controls;
  controls.reserve(solution.policies.size());
  StateVector x = problem.x0;
  for (const AffinePolicy& pol : solution.policies) {
    const double u = policy_action(pol, x);
    controls.push_back(u);
    x = step(problem.dynamics, x, u, 0.0);
  }
  return controls;
}

}  // namespace arattack
