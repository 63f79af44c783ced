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

// Ground-truth environments x_{t+1} = f(x_t, ..., x_{t-q+1}, u_t + w_t) and the
// rollout loop that drives them with an attacker's controls.

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "arattack/core.hpp"

namespace arattack {

/// |x_t| above this aborts a rollout.
inline constexpr double kDivergenceBound = 1e9;

/// One regime of the two-lag threshold model: x_{t+1} = c + a1 x_t + a2 x_{t-1} + v.
struct GnpRegime {
  double intercept;
  double lag1;
  double lag2;
  double sigma;
};

/// Regimes 1..4 of the US real GNP growth threshold model, indexed 0..3.
inline constexpr std::array<GnpRegime, 4> kGnpRegimes = {{
    {-0.015, -1.076, 0.0, 0.0062},
    {-0.006, 0.630, -0.756, 0.0132},
    {0.006, 0.438, 0.0, 0.0094},
    {0.004, 0.443, 0.0, 0.0082},
}};

/// Region index in {1,2,3,4}:
///   1: x_t <= x_{t-1} <= 0      2: x_t > x_{t-1}, x_{t-1} <= 0
///   3: x_t <= x_{t-1}, x_{t-1} > 0   4: x_t > x_{t-1} > 0
/// Ties follow the inequalities exactly as written, so (0.0065, 0) is region 2.
int gnp_regime(double x_t, double x_tm1);

class Dynamics {
 public:
  enum class Kind { kLinear, kThresholdGnp, kRationalMap };

  static Dynamics linear(ArCoefficients coeffs);
  /// Four-regime threshold model, q = 2.
  static Dynamics threshold_gnp();
  /// x_{t+1} = 2 x_t / (1 + 0.8 x_t^2) + v, q = 1.
  static Dynamics rational_map();

  Kind kind() const { return kind_; }
  bool is_linear() const { return kind_ == Kind::kLinear; }
  int order() const { return order_; }
  /// Throws kDomain unless kind() == kLinear.
  const ArCoefficients& coefficients() const;

  /// f(lags, v) where lags = (x_t, x_{t-1}, ...) newest first (at least order()
  /// entries) and v = u + w.
  double evaluate(std::span<const double> lags, double v) const;

  /// df/dx_{t-i} for i = 0..order()-1 at (lags, v). df/dv is 1 for every
  /// built-in model.
  std::vector<double> gradient(std::span<const double> lags, double v) const;

 private:
  Dynamics(Kind kind, int order, ArCoefficients coeffs)
      : kind_(kind), order_(order), coeffs_(std::move(coeffs)) {}

  Kind kind_;
  int order_;
  ArCoefficients coeffs_;
};

const char* to_string(Dynamics::Kind kind);

/// Companion matrix A of a linear environment at dimension dim.
CompanionMatrix dynamics_matrix(const Dynamics& dyn, int dim);

/// x_{t+1} = F(x_t, u, w). Throws DivergenceError (time -1) when the new value is
/// non-finite or exceeds kDivergenceBound.
StateVector step(const Dynamics& dyn, const StateVector& x, double u, double w);

/// Standard normals from mt19937_64. Each pair of 53-bit uniforms (u1, u2) with
/// u1 in (0, 1] becomes sqrt(-2 ln u1) * (cos 2 pi u2, sin 2 pi u2) (Box-Muller),
/// cosine branch first. Identical seeds give bit-identical sequences.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double next();
  double uniform();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct NoiseModel {
  enum class Kind { kNone, kGaussian, kPerRegime };

  Kind kind = Kind::kNone;
  double sigma = 0.0;
  std::array<double, 4> regime_sigmas{};  // used by kPerRegime
  std::uint64_t seed = 0;

  static NoiseModel none() { return {}; }
  static NoiseModel gaussian(double sigma, std::uint64_t seed);
  /// Regime-dependent standard deviations of the threshold model.
  static NoiseModel per_regime(std::array<double, 4> sigmas, std::uint64_t seed);

  /// Same model, different stream.
  NoiseModel with_seed(std::uint64_t s) const {
    NoiseModel m = *this;
    m.seed = s;
    return m;
  }

  /// Scale of w_t given the current state (regime lookup for kPerRegime).
  double scale(const StateVector& x) const;
};

/// The standard-normal draws z_0..z_{T-1} behind a noise model; w_t = scale(x_t) z_t.
/// Every attacker in a trial sees the same draws.
std::vector<double> standard_normals(const NoiseModel& noise, int count);

/// FNV-1a over the bit patterns of a draw sequence.
std::uint64_t stream_hash(std::span<const double> draws);

/// Source of attack actions u_t given the observed state.
class ControlSource {
 public:
  virtual ~ControlSource() = default;
  virtual double act(int t, const StateVector& x) = 0;
};

class ZeroControl final : public ControlSource {
 public:
  double act(int, const StateVector&) override { return 0.0; }
};

class FunctionControl final : public ControlSource {
 public:
  explicit FunctionControl(std::function<double(int, const StateVector&)> fn)
      : fn_(std::move(fn)) {}
  double act(int t, const StateVector& x) override { return fn_(t, x); }

 private:
  std::function<double(int, const StateVector&)> fn_;
};

/// Rolls out T steps. Forecasts are left empty; see fill_forecasts().
/// Divergence errors are rethrown with the offending time step.
Trajectory simulate(const Dynamics& dyn, const NoiseModel& noise, const StateVector& x0,
                    ControlSource& controller, int horizon);

/// Same, with pre-drawn standard normals (paired designs).
Trajectory simulate(const Dynamics& dyn, const NoiseModel& noise, std::span<const double> normals,
                    const StateVector& x0, ControlSource& controller, int horizon);

}  // namespace arattack
