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

#include <span>

namespace arattack {

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample standard deviation / sqrt(n)
  int n = 0;
};

/// Throws kInsufficientTrials for fewer than 2 samples.
MeanStderr mean_stderr(std::span<const double> xs);

struct PairedTTest {
  double mean_difference = 0.0;  // mean(a - b)
  double t = 0.0;                // NaN when a == b, +-inf for a constant nonzero difference
  double p = 1.0;                // two-sided
  int dof = 0;
  bool zero_variance = false;
};

/// Paired t-test on a[i] - b[i]. A zero-variance difference is flagged
/// instead of divided by: p = 1 if the difference is identically 0, else p = 0.
PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b);

/// I_x(a, b) by the modified Lentz continued fraction, evaluated directly for
/// x < (a+1)/(a+b+2) and through I_x(a,b) = 1 - I_{1-x}(b,a) otherwise.
/// The prefactor is formed in log space with lgamma.
double regularized_incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for Student's t with `dof` degrees of freedom, computed as
/// I_{dof/(dof+t^2)}(dof/2, 1/2).
double student_t_two_sided_p(double t, double dof);

}  // namespace arattack
