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

#include <gtest/gtest.h>

#include "arattack/experiments.hpp"
#include "arattack/ilqr.hpp"
#include "arattack/lqr.hpp"
#include "test_support.hpp"

namespace arattack {
namespace {

void expect_shift_structure(const Linearization& lin) {
  const int n = static_cast<int>(lin.dx.rows());
  for (int j = 0; j < n; ++j) EXPECT_EQ(lin.dx(0, j), 0.0);
  for (int i = 2; i < n; ++i) {
    for (int j = 0; j < n; ++j) EXPECT_EQ(lin.dx(i, j), j == i - 1 ? 1.0 : 0.0);
  }
  for (int i = 0; i < n; ++i) EXPECT_EQ(lin.du[i], i == 1 ? 1.0 : 0.0);
}

TEST(Linearize, LinearModelIsConstant) {
  const auto dyn = Dynamics::linear(ArCoefficients(0.0, {0.7}));
  for (double x : {-3.0, 0.0, 2.5}) {
    const auto lin = linearize(dyn, lift_state(std::vector<double>{x}, 1), 0.3);
    EXPECT_EQ(lin.dx(1, 0), 0.0);
    EXPECT_EQ(lin.dx(1, 1), 0.7);
    EXPECT_EQ(lin.du[1], 1.0);
    expect_shift_structure(lin);
  }
}

TEST(Linearize, RationalMapSlopeAtOrigin) {
  const auto lin = linearize(Dynamics::rational_map(), lift_state(std::vector<double>{0.0}, 1), 0);
  EXPECT_EQ(lin.dx(1, 1), 2.0);
}

TEST(Linearize, RationalMapMatchesFiniteDifferenceAtThree) {
  const auto x = lift_state(std::vector<double>{3.0}, 1);
  const auto a = linearize(Dynamics::rational_map(), x, 0);
  const auto f = linearize_fd(Dynamics::rational_map(), x, 0, 1e-6);
  EXPECT_NEAR(a.dx(1, 1), f.dx(1, 1), 1e-5);
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); }

void check_fd(const Dynamics& dyn, int dim, std::function<std::vector<double>(std::mt19937_64&)> draw) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> uu(-1, 1);
  for (int i = 0; i < 100; ++i) {
    const auto hist = draw(rng);
    const auto x = lift_state(hist, dim);
    const double u = 0.1 * uu(rng);
    const auto a = linearize(dyn, x, u);
    const auto f = linearize_fd(dyn, x, u, 1e-6);
    expect_shift_structure(a);
    for (int j = 0; j <= dim; ++j) EXPECT_LT(rel_err(a.dx(1, j), f.dx(1, j)), 1e-5);
    EXPECT_LT(rel_err(a.du[1], f.du[1]), 1e-5);
  }
}

TEST(Linearize, AnalyticMatchesFiniteDifferences) {
  check_fd(Dynamics::linear(ArCoefficients(0.3, {0.4, -0.3, -0.7})), 3, [](std::mt19937_64& r) {
    std::uniform_real_distribution<double> u(-10, 10);
    return std::vector<double>{u(r), u(r), u(r)};
  });
  check_fd(Dynamics::rational_map(), 1, [](std::mt19937_64& r) {
    std::uniform_real_distribution<double> u(-5, 5);
    return std::vector<double>{u(r)};
  });
  // Keep threshold points away from the regime boundaries, where f is not
  // differentiable; the control shift must not cross one either.
  check_fd(Dynamics::threshold_gnp(), 2, [](std::mt19937_64& r) {
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    for (;;) {
      const double xt = u(r), xm = u(r);
      if (std::abs(xt - xm) > 1e-3 && std::abs(xm) > 1e-3) return std::vector<double>{xt, xm};
    }
  });
}

TEST(IlqrConfig, Validation) {
  IlqrConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.tol = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = IlqrConfig{};
  cfg.maxiter = 0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(IlqrSolve, OneIterationExactOnLinearSystems) {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    const auto pb = testing::random_linear(rng).problem();
    const auto lqr = lqr_open_loop(pb, solve_lqr(pb));
    IlqrConfig cfg;
    cfg.tol = 1e-20;
    const auto res = ilqr_solve(pb, cfg);
    EXPECT_EQ(res.exit, IlqrExit::kConverged);
    EXPECT_EQ(res.iterations, 1);
    EXPECT_LT(res.last_step_msq, 1e-20);
    ASSERT_EQ(res.controls.size(), lqr.size());
    for (std::size_t t = 0; t < lqr.size(); ++t) EXPECT_NEAR(res.controls[t], lqr[t], 1e-8);
  }
}

TEST(IlqrSolve, WarmStartFromOptimumStopsImmediately) {
  std::mt19937_64 rng(32);
  const auto pb = testing::random_linear(rng).problem();
  const auto lqr = lqr_open_loop(pb, solve_lqr(pb));
  const auto res = ilqr_solve(pb, IlqrConfig{}, lqr);
  EXPECT_EQ(res.iterations, 0);
  EXPECT_EQ(res.controls, lqr);
}

TEST(IlqrSolve, FiniteDifferenceJacobiansGiveSameControls) {
  const auto inst = instantiate(build_scenario("S4"));
  IlqrConfig a, b;
  a.tol = b.tol = 1e-12;
  b.jacobian = JacobianMode::kFiniteDifference;
  auto pb = inst.problem.window(17, 27, inst.problem.x0);
  const auto ra = ilqr_solve(pb, a);
  const auto rb = ilqr_solve(pb, b);
  for (std::size_t t = 0; t < ra.controls.size(); ++t) {
    EXPECT_NEAR(ra.controls[t], rb.controls[t], 1e-6);
  }
}

TEST(IlqrSolve, NeverWorseThanDoingNothing) {
  for (const char* id : {"S2", "S3", "S4", "S1-tomorrow", "S1-last-day", "S1-all"}) {
    const auto inst = instantiate(build_scenario(id));
    const auto& pb = inst.problem;
    const auto res = ilqr_solve(pb, IlqrConfig{});
    const std::vector<double> zero(pb.num_controls(), 0.0);
    EXPECT_LE(res.cost, deterministic_cost(pb, zero)) << id;
    EXPECT_DOUBLE_EQ(res.cost, deterministic_cost(pb, res.controls)) << id;
  }
}

TEST(IlqrSolve, ConvergesOnNonlinearWindow) {
  const auto inst = instantiate(build_scenario("S3"));
  const auto res = ilqr_solve(inst.problem.window(4, 9, inst.problem.x0), IlqrConfig{});
  EXPECT_EQ(res.exit, IlqrExit::kConverged);
  EXPECT_LT(res.last_step_msq, 1e-4);
}

}  // namespace
}  // namespace arattack
