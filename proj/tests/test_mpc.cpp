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
#include "arattack/lqr.hpp"
#include "arattack/mpc.hpp"
#include "test_support.hpp"

namespace arattack {
namespace {

TEST(MpcController, WindowShrinksTowardTheEnd) {
  const auto inst = instantiate(build_scenario("S3"));
  MpcController mpc(inst.problem, 5, IlqrConfig{});
  const auto tr = simulate(inst.dynamics, NoiseModel::none(), inst.problem.x0, mpc, 10);
  const auto& counts = mpc.planned_counts();
  ASSERT_EQ(counts.size(), 9u);  // tau = 0..8 plan, tau = 9 plays 0
  for (int tau = 0; tau < 9; ++tau) {
    EXPECT_EQ(counts[tau], mpc.window_end(tau) - tau + 1);
    if (tau + 5 - 1 >= 8 && tau > 0) EXPECT_LE(counts[tau], counts[tau - 1]);
  }
  EXPECT_EQ(mpc.window_end(0), 4);
  EXPECT_EQ(mpc.window_end(7), 8);
  EXPECT_EQ(tr.controls.size(), 10u);
  EXPECT_EQ(tr.controls.back(), 0.0);
}

TEST(MpcController, SequentialCallsAndExhaustion) {
  const auto inst = instantiate(build_scenario("S3"));
  MpcController mpc(inst.problem, 5, IlqrConfig{});
  const auto& x = inst.problem.x0;
  EXPECT_THROW(mpc.act(1, x), Error);
  for (int t = 0; t < 9; ++t) mpc.act(t, x);
  EXPECT_EQ(mpc.act(9, x), 0.0);
  try {
    mpc.act(10, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kExhausted);
  }
}

TEST(MpcController, LongWindowOnLinearSystemReproducesLqr) {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 10; ++rep) {
    const auto pb = testing::random_linear(rng).problem();
    const auto lqr = lqr_open_loop(pb, solve_lqr(pb));
    IlqrConfig cfg;
    cfg.tol = 1e-24;
    MpcController mpc(pb, pb.horizon + 3, cfg);
    const auto tr = simulate(pb.dynamics, NoiseModel::none(), pb.x0, mpc, pb.horizon);
    for (int t = 0; t < pb.horizon; ++t) EXPECT_NEAR(tr.controls[t], lqr[t], 1e-8);
  }
}

TEST(MpcController, LongWindowFirstPlanEqualsFullIlqr) {
  const auto inst = instantiate(build_scenario("S3"));
  MpcController mpc(inst.problem, 20, IlqrConfig{});
  mpc.act(0, inst.problem.x0);
  const auto full = ilqr_solve(inst.problem.window(0, 9, inst.problem.x0), IlqrConfig{});
  EXPECT_EQ(mpc.plans().front().controls, full.controls);
}

TEST(MpcController, LastDayTermVisibleToShortWindows) {
  const auto inst = instantiate(build_scenario("S3"));
  MpcController mpc(inst.problem, 5, IlqrConfig{});
  const double u0 = mpc.act(0, inst.problem.x0);
  EXPECT_NE(u0, 0.0);
}

TEST(MpcController, PassiveBeforeFirstActive) {
  const auto inst = instantiate(build_scenario("S4"));
  MpcController mpc(inst.problem, 10, IlqrConfig{}, 17);
  const auto tr = simulate(inst.dynamics, inst.noise, inst.problem.x0, mpc, 50);
  for (int t = 0; t < 17; ++t) EXPECT_EQ(tr.controls[t], 0.0);
  EXPECT_NE(tr.controls[17], 0.0);
  EXPECT_EQ(mpc.plans().size(), 49u - 17u);
}

TEST(MpcController, RejectsBadLookahead) {
  const auto inst = instantiate(build_scenario("S3"));
  EXPECT_THROW(MpcController(inst.problem, 0, IlqrConfig{}), Error);
}

}  // namespace
}  // namespace arattack
