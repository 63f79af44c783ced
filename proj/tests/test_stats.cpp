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

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <random>

#include "arattack/environment.hpp"
#include "arattack/stats.hpp"

namespace arattack {
namespace {

double boost_two_sided(double t, double dof) {
  boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

TEST(MeanStderr, SampleStandardDeviationOverRootN) {
  const std::vector<double> xs{1, 2, 3, 4};
  const auto s = mean_stderr(xs);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.stderr_, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_EQ(s.n, 4);
  try {
    mean_stderr(std::vector<double>{1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInsufficientTrials);
  }
}

TEST(PairedTTest, IdenticalListsFlagZeroVariance) {
  const std::vector<double> a{1, 5, 2};
  const auto r = paired_t_test(a, a);
  EXPECT_TRUE(r.zero_variance);
  EXPECT_TRUE(std::isnan(r.t));
  EXPECT_EQ(r.p, 1.0);
}

TEST(PairedTTest, ConstantDifference) {
  const auto r = paired_t_test(std::vector<double>{1, 2, 3}, std::vector<double>{2, 3, 4});
  EXPECT_EQ(r.mean_difference, -1.0);
  EXPECT_TRUE(r.zero_variance);
  EXPECT_TRUE(std::isinf(r.t) && r.t < 0);
  EXPECT_EQ(r.p, 0.0);
}

TEST(PairedTTest, ShiftedNoiseIsHighlySignificant) {
  NormalStream z(71);
  std::vector<double> a(50), b(50);
  for (int i = 0; i < 50; ++i) {
    b[i] = 10 * z.next();
    a[i] = b[i] + 1.0 + 0.1 * z.next();
  }
  const auto r = paired_t_test(a, b);
  EXPECT_LT(r.p, 1e-20);
  EXPECT_EQ(r.dof, 49);
  const double ref = boost_two_sided(r.t, 49);
  EXPECT_NEAR(std::log(r.p), std::log(ref), 1e-6);
}

TEST(PairedTTest, MismatchedLengthsThrow) {
  EXPECT_THROW(paired_t_test(std::vector<double>{1, 2}, std::vector<double>{1}), Error);
}

TEST(StudentT, PublishedTableCriticalValues) {
  // Two-sided critical values: t_{0.975, dof} and t_{0.995, dof}.
  struct Row { double dof, t05, t01; };
  const Row table[] = {{1, 12.706, 63.657}, {5, 2.571, 4.032}, {10, 2.228, 3.169},
                       {30, 2.042, 2.750},  {49, 2.010, 2.680}, {120, 1.980, 2.617}};
  for (const auto& r : table) {
    EXPECT_NEAR(student_t_two_sided_p(r.t05, r.dof), 0.05, 5e-4) << r.dof;
    EXPECT_NEAR(student_t_two_sided_p(r.t01, r.dof), 0.01, 1e-4) << r.dof;
  }
}

TEST(StudentT, AgreesWithReferenceImplementation) {
  std::mt19937_64 rng(72);
  std::uniform_real_distribution<double> ut(-60, 60);
  std::uniform_int_distribution<int> ud(1, 200);
  for (int i = 0; i < 2000; ++i) {
    const double t = ut(rng);
    const double dof = ud(rng);
    const double ref = boost_two_sided(t, dof);
    const double p = student_t_two_sided_p(t, dof);
    if (ref > 1e-300) {
      EXPECT_NEAR(p / ref, 1.0, 1e-9) << "t=" << t << " dof=" << dof;
    } else {
      EXPECT_LT(p, 1e-290);
    }
  }
  EXPECT_EQ(student_t_two_sided_p(0.0, 10), 1.0);
  EXPECT_EQ(student_t_two_sided_p(INFINITY, 10), 0.0);
}

TEST(IncompleteBeta, AgreesWithReferenceImplementation) {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> ua(0.1, 50), ux(0, 1);
  for (int i = 0; i < 2000; ++i) {
    const double a = ua(rng), b = ua(rng), x = ux(rng);
    EXPECT_NEAR(regularized_incomplete_beta(a, b, x), boost::math::ibeta(a, b, x), 1e-12);
  }
  EXPECT_EQ(regularized_incomplete_beta(2, 3, 0), 0.0);
  EXPECT_EQ(regularized_incomplete_beta(2, 3, 1), 1.0);
  EXPECT_THROW(regularized_incomplete_beta(0, 1, 0.5), Error);
  EXPECT_THROW(regularized_incomplete_beta(1, 1, 1.5), Error);
}

}  // namespace
}  // namespace arattack
