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

#include "arattack/environment.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

namespace arattack {

int gnp_regime(double x_t, double x_tm1) {
  if (x_tm1 <= 0.0) return x_t <= x_tm1 ? 1 : 2;
  return x_t <= x_tm1 ? 3 : 4;
}

Dynamics Dynamics::linear(ArCoefficients coeffs) {
  const int order = coeffs.order();
  return Dynamics(Kind::kLinear, order, std::move(coeffs));
}

Dynamics Dynamics::threshold_gnp() { return Dynamics(Kind::kThresholdGnp, 2, {}); }

Dynamics Dynamics::rational_map() { return Dynamics(Kind::kRationalMap, 1, {}); }

const ArCoefficients& Dynamics::coefficients() const {
  if (kind_ != Kind::kLinear) throw Error(ErrorKind::kDomain, "dynamics are not linear");
  return coeffs_;
}

double Dynamics::evaluate(std::span<const double> lags, double v) const {
  if (static_cast<int>(lags.size()) < order_) {
    throw Error(ErrorKind::kDimensionMismatch, "dynamics need more lags");
  }
  switch (kind_) {
    case Kind::kLinear: {
      double next = coeffs_.intercept + v;
      for (int i = 0; i < order_; ++i) next += coeffs_.lags[i] * lags[i];
      return next;
    }
    case Kind::kThresholdGnp: {
      const GnpRegime& r = kGnpRegimes[gnp_regime(lags[0], lags[1]) - 1];
      return r.intercept + r.lag1 * lags[0] + r.lag2 * lags[1] + v;
    }
    case Kind::kRationalMap: {
      const double x = lags[0];
      return 2.0 * x / (1.0 + 0.8 * x * x) + v;
    }
  }
  return 0.0;
}

std::vector<double> Dynamics::gradient(std::span<const double> lags, double) const {
  if (static_cast<int>(lags.size()) < order_) {
    throw Error(ErrorKind::kDimensionMismatch, "dynamics need more lags");
  }
  switch (kind_) {
    case Kind::kLinear:
      return coeffs_.lags;
    case Kind::kThresholdGnp: {
      // Regime owning the nominal point, boundary points included.
      const GnpRegime& r = kGnpRegimes[gnp_regime(lags[0], lags[1]) - 1];
      return {r.lag1, r.lag2};
    }
    case Kind::kRationalMap: {
      const double x = lags[0];
      const double den = 1.0 + 0.8 * x * x;
      return {2.0 * (1.0 - 0.8 * x * x) / (den * den)};
    }
  }
  return {};
}

const char* to_string(Dynamics::Kind kind) {
  switch (kind) {
    case Dynamics::Kind::kLinear: return "linear";
    case Dynamics::Kind::kThresholdGnp: return "threshold_gnp";
    case Dynamics::Kind::kRationalMap: return "rational_map";
  }
  return "unknown";
}

CompanionMatrix dynamics_matrix(const Dynamics& dyn, int dim) {
  return companion_matrix(dyn.coefficients(), dim);
}

StateVector step(const Dynamics& dyn, const StateVector& x, double u, double w) {
  const int d = x.dim();
  if (d < dyn.order()) throw Error(ErrorKind::kDimensionMismatch, "state shorter than dynamics order");
  const Vector& v = x.values();
  const double next = dyn.evaluate(std::span<const double>(v.data() + 1, d), u + w);
  if (!std::isfinite(next) || std::abs(next) > kDivergenceBound) throw DivergenceError(-1, next);
  Vector out(d + 1);
  out[0] = 1.0;
  out[1] = next;
  for (int i = 2; i <= d; ++i) out[i] = v[i - 1];
  return StateVector(std::move(out));
}

double NormalStream::uniform() {
  // (0, 1]: never 0, so log() below is finite.
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

NoiseModel NoiseModel::gaussian(double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw Error(ErrorKind::kDomain, "noise sigma must be >= 0");
  NoiseModel m;
  m.kind = Kind::kGaussian;
  m.sigma = sigma;
  m.seed = seed;
  return m;
}

NoiseModel NoiseModel::per_regime(std::array<double, 4> sigmas, std::uint64_t seed) {
  for (double s : sigmas) {
    if (!(s >= 0.0)) throw Error(ErrorKind::kDomain, "noise sigma must be >= 0");
  }
  NoiseModel m;
  m.kind = Kind::kPerRegime;
  m.regime_sigmas = sigmas;
  m.seed = seed;
  return m;
}

double NoiseModel::scale(const StateVector& x) const {
  switch (kind) {
    case Kind::kNone: return 0.0;
    case Kind::kGaussian: return sigma;
    case Kind::kPerRegime: {
      const double prev = x.dim() >= 2 ? x[2] : 0.0;
      return regime_sigmas[gnp_regime(x.current(), prev) - 1];
    }
  }
  return 0.0;
}

std::vector<double> standard_normals(const NoiseModel& noise, int count) {
  std::vector<double> z(count, 0.0);
  if (noise.kind == NoiseModel::Kind::kNone) return z;
  NormalStream stream(noise.seed);
  for (double& v : z) v = stream.next();
  return z;
}

std::uint64_t stream_hash(std::span<const double> draws) {
  std::uint64_t h = 14695981039346656037ull;
  for (double d : draws) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return h;
}

Trajectory simulate(const Dynamics& dyn, const NoiseModel& noise, const StateVector& x0,
                    ControlSource& controller, int horizon) {
  const auto z = standard_normals(noise, horizon);
  return simulate(dyn, noise, z, x0, controller, horizon);
}

Trajectory simulate(const Dynamics& dyn, const NoiseModel& noise, std::span<const double> normals,
                    const StateVector& x0, ControlSource& controller, int horizon) {
  if (horizon < 1) throw Error(ErrorKind::kDomain, "horizon must be >= 1");
  if (static_cast<int>(normals.size()) < horizon) {
    throw Error(ErrorKind::kDimensionMismatch, "not enough noise draws");
  }
  Trajectory traj;
  traj.states.reserve(horizon + 1);
  traj.states.push_back(x0);
  for (int t = 0; t < horizon; ++t) {
    const StateVector& x = traj.states.back();
    const double u = controller.act(t, x);
    const double w = noise.scale(x) * normals[t];
    try {
      traj.states.push_back(step(dyn, x, u, w));
    } catch (const DivergenceError& e) {
      throw DivergenceError(t + 1, e.value());
    }
    traj.controls.push_back(u);
    traj.noises.push_back(w);
  }
  return traj;
}

}  // namespace arattack
