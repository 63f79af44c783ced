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

#include "arattack/ilqr.hpp"

#include <cmath>
#include <limits>

namespace arattack {

namespace {

Linearization shift_structure(int d) {
  Linearization lin{Matrix::Zero(d + 1, d + 1), Vector::Zero(d + 1)};
  for (int i = 2; i <= d; ++i) lin.dx(i, i - 1) = 1.0;
  return lin;
}

std::span<const double> lags_of(const StateVector& x) {
  return std::span<const double>(x.values().data() + 1, x.dim());
}

}  // namespace

void IlqrConfig::validate() const {
  if (maxiter < 1) throw Error(ErrorKind::kConfig, "iLQR maxiter must be >= 1");
  if (!(tol > 0.0)) throw Error(ErrorKind::kConfig, "iLQR tol must be positive");
  if (!(fd_step > 0.0)) throw Error(ErrorKind::kConfig, "finite-difference step must be positive");
}

Linearization linearize(const Dynamics& dyn, const StateVector& x, double u) {
  const int d = x.dim();
  Linearization lin = shift_structure(d);
  const auto grad = dyn.gradient(lags_of(x), u);
  for (int i = 0; i < static_cast<int>(grad.size()) && i < d; ++i) lin.dx(1, i + 1) = grad[i];
  lin.du[1] = 1.0;
  return lin;
}

Linearization linearize_fd(const Dynamics& dyn, const StateVector& x, double u, double h) {
  const int d = x.dim();
  Linearization lin = shift_structure(d);
  std::vector<double> lags(lags_of(x).begin(), lags_of(x).end());
  for (int i = 0; i < d; ++i) {
    const double saved = lags[i];
    lags[i] = saved + h;
    const double up = dyn.evaluate(lags, u);
    lags[i] = saved - h;
    const double down = dyn.evaluate(lags, u);
    lags[i] = saved;
    lin.dx(1, i + 1) = (up - down) / (2.0 * h);
  }
  lin.du[1] = (dyn.evaluate(lags, u + h) - dyn.evaluate(lags, u - h)) / (2.0 * h);
  return lin;
}

IlqrResult ilqr_solve(const AttackProblem& problem, const IlqrConfig& cfg,
                      std::optional<std::vector<double>> warm_start) {
  problem.validate();
  cfg.validate();
  const int n = problem.num_controls();
  const int d = problem.dim();
  const double lambda = problem.lambda;

  std::vector<double> u(n, 0.0);
  if (warm_start) {
    for (int i = 0; i < n && i < static_cast<int>(warm_start->size()); ++i) u[i] = (*warm_start)[i];
  }

  CompanionPowers powers(problem.forecaster);
  std::vector<std::vector<ForecastTerm>> terms(n + 1);
  for (int i = 1; i <= n; ++i) {
    terms[i] = forecast_terms(powers, problem.pattern, problem.targets, problem.start + i,
                              problem.horizon);
  }

  auto cost_of = [&](const std::vector<StateVector>& xs, const std::vector<double>& us) {
    double c = 0.0;
    for (int i = 1; i <= n; ++i) {
      for (const ForecastTerm& term : terms[i]) {
        const double miss = term.row.dot(xs[i].values()) - term.target;
        c += term.beta * miss * miss;
      }
    }
    for (double v : us) c += lambda * v * v;
    return c;
  };

  IlqrResult result;
  std::vector<StateVector> xs = nominal_rollout(problem, u);
  double cost = cost_of(xs, u);
  std::vector<double> best_u = u;
  double best_cost = cost;
  int increases = 0;

  std::vector<Linearization> lin(n);
  std::vector<RowVector> gains(n);
  std::vector<double> offsets(n);
  std::vector<double> du(n);

  for (int iter = 0; iter < cfg.maxiter; ++iter) {
    for (int i = 0; i < n; ++i) {
      lin[i] = cfg.jacobian == JacobianMode::kAnalytic
                   ? linearize(problem.dynamics, xs[i], u[i])
                   : linearize_fd(problem.dynamics, xs[i], u[i], cfg.fd_step);
    }

    // Backward pass on the delta problem; terminal value carries the tracking
    // terms of the last state in the window.
    Matrix P = Matrix::Zero(d + 1, d + 1);
    Vector q = Vector::Zero(d + 1);
    auto add_stage = [&](int i) {
      for (const ForecastTerm& term : terms[i]) {
        const double miss = term.row.dot(xs[i].values()) - term.target;
        P.noalias() += term.beta * term.row.transpose() * term.row;
        q.noalias() += 2.0 * term.beta * miss * term.row.transpose();
      }
    };
    add_stage(n);
    for (int i = n - 1; i >= 0; --i) {
      const Matrix& fx = lin[i].dx;
      const Vector& fu = lin[i].du;
      const Vector pfu = P * fu;
      const double den = lambda + fu.dot(pfu);
      if (!(den > 0.0)) throw Error(ErrorKind::kSolverInstability, "lambda + Du'P Du <= 0");
      const RowVector fupfx = pfu.transpose() * fx;
      const double lin_term = fu.dot(q) + 2.0 * lambda * u[i];
      gains[i] = -fupfx / den;
      offsets[i] = -lin_term / (2.0 * den);

      Matrix P_next = fx.transpose() * P * fx - fupfx.transpose() * fupfx / den;
      Vector q_next = fx.transpose() * q - fupfx.transpose() * (lin_term / den);
      P = 0.5 * (P_next + P_next.transpose());
      q = std::move(q_next);
      if (i > 0) add_stage(i);
    }

    // Forward pass on the linearized deltas, starting from delta-x = 0.
    Vector dx = Vector::Zero(d + 1);
    double msq = 0.0;
    for (int i = 0; i < n; ++i) {
      du[i] = gains[i].dot(dx) + offsets[i];
      msq += du[i] * du[i];
      dx = lin[i].dx * dx + lin[i].du * du[i];
    }
    msq /= n;
    result.last_step_msq = msq;
    if (msq < cfg.tol) {
      result.exit = IlqrExit::kConverged;
      break;
    }

    for (int i = 0; i < n; ++i) u[i] += du[i];
    ++result.iterations;
    xs = nominal_rollout(problem, u);
    const double new_cost = cost_of(xs, u);
    increases = new_cost > cost ? increases + 1 : 0;
    cost = new_cost;
    if (cost < best_cost) {
      best_cost = cost;
      best_u = u;
    }
    if (increases >= 5) {
      result.exit = IlqrExit::kCostGuard;
      result.controls = best_u;
      result.cost = best_cost;
      return result;
    }
  }
  result.controls = u;
  result.cost = cost;
  return result;
}

}  // namespace arattack
