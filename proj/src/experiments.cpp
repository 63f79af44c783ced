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

#include "arattack/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "arattack/greedy.hpp"
#include "arattack/lqr.hpp"
#include "arattack/mpc.hpp"
#include "arattack/sysid.hpp"

namespace arattack {

using nlohmann::json;

namespace {

// Offset between the trial seeds and the seed of the forecaster-fitting prelude.
constexpr std::uint64_t kPreludeSeedOffset = 0x9E3779B97F4A7C15ULL;

[[noreturn]] void config_error(const std::string& field, const std::string& msg) {
  throw Error(ErrorKind::kConfig, field + ": " + msg);
}

Scenario s1(PatternKind kind, const std::string& id) {
  Scenario s;
  s.id = id;
  s.dynamics = {Dynamics::Kind::kLinear, ArCoefficients(1.0, {0.5})};
  s.noise.kind = NoiseModel::Kind::kGaussian;
  s.noise.sigma = 0.1;
  s.forecaster.coeffs = ArCoefficients(0.9, {0.6});
  s.pattern = {kind, 0};
  s.targets = {TargetSpec::Kind::kConstant, 1.0};
  s.lambda_tilde = 0.1;
  s.horizon = 10;
  s.x0 = {0.0};
  s.trials = 50;
  s.seed = 7;
  return s;
}

Scenario s2() {
  Scenario s;
  s.id = "S2-lqr-vs-greedy";
  s.dynamics = {Dynamics::Kind::kLinear, ArCoefficients(0.0, {0.4, -0.3, -0.7})};
  s.noise.kind = NoiseModel::Kind::kGaussian;
  s.noise.sigma = 0.1;
  s.forecaster.coeffs = ArCoefficients(0.0, {0.41, -0.29, -0.68});
  s.pattern = {PatternKind::kTomorrow, 0};
  s.targets = {TargetSpec::Kind::kScaledNominal, 0.5};
  s.lambda_tilde = 0.1;
  s.horizon = 15;
  s.x0 = {10.0, 0.0, 0.0};
  s.trials = 50;
  s.seed = 7;
  return s;
}

Scenario s3() {
  Scenario s;
  s.id = "S3-gnp";
  s.dynamics.kind = Dynamics::Kind::kThresholdGnp;
  s.noise.kind = NoiseModel::Kind::kPerRegime;
  for (int i = 0; i < 4; ++i) s.noise.regime_sigmas[i] = kGnpRegimes[i].sigma;
  s.forecaster.coeffs = ArCoefficients(0.0041, {0.33, 0.13});
  s.pattern = {PatternKind::kLastDay, 0};
  s.targets = {TargetSpec::Kind::kConstant, 0.01};
  s.lambda_tilde = 0.001;
  s.horizon = 10;
  s.x0 = {0.0065, 0.0};
  s.trials = 50;
  s.seed = 7;
  s.solver.mpc_lookahead = 5;
  return s;
}

Scenario s4() {
  Scenario s;
  s.id = "S4-sysid";
  s.dynamics.kind = Dynamics::Kind::kRationalMap;
  s.noise.kind = NoiseModel::Kind::kGaussian;
  s.noise.sigma = 0.1;
  s.forecaster.kind = ForecasterSpec::Kind::kFitOnPrelude;
  s.forecaster.order = 1;
  s.forecaster.prelude_length = 50;
  s.forecaster.fit_intercept = false;
  s.solver.sysid_buffer = 15;
  s.solver.sysid_order = 3;
  s.solver.sysid_lookahead = 5;
  s.solver.oracle_lookahead = 10;
  // Attacks start once the identification buffer is full.
  s.pattern = {PatternKind::kTomorrow, s.solver.sysid_buffer + s.solver.sysid_order - 1};
  s.targets = {TargetSpec::Kind::kConstant, 2.0};
  s.lambda_tilde = 0.01;
  s.horizon = 50;
  s.x0 = {3.0};
  s.trials = 100;
  s.seed = 7;
  return s;
}

// ---- JSON helpers ----

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) config_error(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) config_error(path.empty() ? key : path + "." + key, "missing required field");
  return *it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double get_double(const json& v, const std::string& path) {
  if (!v.is_number()) config_error(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) config_error(path, "must be finite");
  return d;
}

int get_int(const json& v, const std::string& path, int lo, int hi) {
  if (!v.is_number_integer()) config_error(path, "expected an integer");
  const auto i = v.get<long long>();
  if (i < lo || i > hi) {
    config_error(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(i);
}

std::vector<double> get_doubles(const json& v, const std::string& path) {
  if (!v.is_array()) config_error(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(get_double(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) config_error(path, "expected a string");
  return v.get<std::string>();
}

ArCoefficients get_coeffs(const json& j, const std::string& path) {
  const double c0 = get_double(require(j, "intercept", path), join(path, "intercept"));
  std::vector<double> lags = get_doubles(require(j, "lags", path), join(path, "lags"));
  if (lags.empty()) config_error(join(path, "lags"), "need at least one lag");
  return ArCoefficients(c0, std::move(lags));
}

json coeffs_json(const ArCoefficients& c) { return {{"intercept", c.intercept}, {"lags", c.lags}}; }

const char* dynamics_name(Dynamics::Kind k) {
  switch (k) {
    case Dynamics::Kind::kLinear: return "linear";
    case Dynamics::Kind::kThresholdGnp: return "threshold-gnp";
    case Dynamics::Kind::kRationalMap: return "rational-map";
  }
  return "?";
}

const char* noise_name(NoiseModel::Kind k) {
  switch (k) {
    case NoiseModel::Kind::kNone: return "none";
    case NoiseModel::Kind::kGaussian: return "gaussian";
    case NoiseModel::Kind::kPerRegime: return "per-regime";
  }
  return "?";
}

const char* pattern_name(PatternKind k) {
  switch (k) {
    case PatternKind::kTomorrow: return "tomorrow";
    case PatternKind::kLastDay: return "last-day";
    case PatternKind::kAll: return "all";
    case PatternKind::kCustom: return "custom";
  }
  return "?";
}

DynamicsSpec parse_dynamics(const json& j, const std::string& path) {
  DynamicsSpec d;
  const std::string kind = get_string(require(j, "kind", path), join(path, "kind"));
  if (kind == "linear") {
    d.kind = Dynamics::Kind::kLinear;
    d.coeffs = get_coeffs(j, path);
  } else if (kind == "threshold-gnp") {
    d.kind = Dynamics::Kind::kThresholdGnp;
  } else if (kind == "rational-map") {
    d.kind = Dynamics::Kind::kRationalMap;
  } else {
    config_error(join(path, "kind"), "unknown dynamics '" + kind + "'");
  }
  return d;
}

NoiseSpec parse_noise(const json& j, const std::string& path) {
  NoiseSpec n;
  const std::string kind = get_string(require(j, "kind", path), join(path, "kind"));
  if (kind == "none") {
    n.kind = NoiseModel::Kind::kNone;
  } else if (kind == "gaussian") {
    n.kind = NoiseModel::Kind::kGaussian;
    n.sigma = get_double(require(j, "sigma", path), join(path, "sigma"));
    if (n.sigma < 0.0) config_error(join(path, "sigma"), "must be >= 0");
  } else if (kind == "per-regime") {
    n.kind = NoiseModel::Kind::kPerRegime;
    const auto s = get_doubles(require(j, "sigmas", path), join(path, "sigmas"));
    if (s.size() != 4) config_error(join(path, "sigmas"), "need exactly 4 entries");
    for (int i = 0; i < 4; ++i) {
      if (s[i] < 0.0) config_error(join(path, "sigmas"), "must be >= 0");
      n.regime_sigmas[i] = s[i];
    }
  } else {
    config_error(join(path, "kind"), "unknown noise '" + kind + "'");
  }
  return n;
}

ForecasterSpec parse_forecaster(const json& j, const std::string& path) {
  ForecasterSpec f;
  const std::string kind = get_string(require(j, "kind", path), join(path, "kind"));
  if (kind == "fixed") {
    f.kind = ForecasterSpec::Kind::kFixed;
    f.coeffs = get_coeffs(j, path);
  } else if (kind == "fit-on-prelude") {
    f.kind = ForecasterSpec::Kind::kFitOnPrelude;
    f.order = get_int(require(j, "order", path), join(path, "order"), 1, 64);
    f.prelude_length =
        get_int(require(j, "prelude_length", path), join(path, "prelude_length"), 2, 1000000);
    if (j.contains("fit_intercept")) {
      if (!j["fit_intercept"].is_boolean()) config_error(join(path, "fit_intercept"), "expected a boolean");
      f.fit_intercept = j["fit_intercept"].get<bool>();
    }
  } else {
    config_error(join(path, "kind"), "unknown forecaster '" + kind + "'");
  }
  return f;
}

PatternSpec parse_pattern(const json& j, const std::string& path) {
  PatternSpec p;
  const std::string kind = get_string(require(j, "kind", path), join(path, "kind"));
  if (kind == "tomorrow") {
    p.kind = PatternKind::kTomorrow;
  } else if (kind == "last-day") {
    p.kind = PatternKind::kLastDay;
  } else if (kind == "all") {
    p.kind = PatternKind::kAll;
  } else {
    config_error(join(path, "kind"), "unknown pattern '" + kind + "'");
  }
  if (j.contains("first_decision")) {
    p.first_decision = get_int(j["first_decision"], join(path, "first_decision"), 0, 1000000);
  }
  return p;
}

TargetSpec parse_targets(const json& j, const std::string& path) {
  TargetSpec t;
  const std::string kind = get_string(require(j, "kind", path), join(path, "kind"));
  if (kind == "constant") {
    t.kind = TargetSpec::Kind::kConstant;
  } else if (kind == "scaled-nominal") {
    t.kind = TargetSpec::Kind::kScaledNominal;
  } else {
    config_error(join(path, "kind"), "unknown target kind '" + kind + "'");
  }
  t.value = get_double(require(j, "value", path), join(path, "value"));
  return t;
}

void parse_solver(const json& j, SolverParams& s) {
  const std::string path = "solver";
  if (!j.is_object()) config_error(path, "expected an object");
  for (const auto& [key, v] : j.items()) {
    const std::string p = join(path, key);
    if (key == "mpc_lookahead") s.mpc_lookahead = get_int(v, p, 1, 100000);
    else if (key == "ilqr_tol") {
      s.ilqr_tol = get_double(v, p);
      if (!(s.ilqr_tol > 0.0)) config_error(p, "must be > 0");
    } else if (key == "ilqr_maxiter") s.ilqr_maxiter = get_int(v, p, 1, 100000000);
    else if (key == "sysid_buffer") s.sysid_buffer = get_int(v, p, 1, 100000);
    else if (key == "sysid_order") s.sysid_order = get_int(v, p, 1, 64);
    else if (key == "sysid_lookahead") s.sysid_lookahead = get_int(v, p, 1, 100000);
    else if (key == "oracle_lookahead") s.oracle_lookahead = get_int(v, p, 1, 100000);
    else config_error(p, "unknown field");
  }
}

void check_ranges(const Scenario& s) {
  if (s.horizon < 2) config_error("horizon", "must be >= 2");
  if (!(s.lambda_tilde > 0.0)) config_error("lambda_tilde", "must be > 0");
  if (s.x0.empty()) config_error("x0", "need at least one value");
  if (s.trials < 1) config_error("trials", "must be >= 1");
  if (s.pattern.first_decision > s.horizon - 1) {
    config_error("pattern.first_decision", "must be <= horizon - 1");
  }
  const int dyn_order = s.dynamics.kind == Dynamics::Kind::kLinear ? s.dynamics.coeffs.order()
                        : s.dynamics.kind == Dynamics::Kind::kThresholdGnp ? 2
                                                                            : 1;
  if (s.noise.kind == NoiseModel::Kind::kPerRegime &&
      s.dynamics.kind != Dynamics::Kind::kThresholdGnp) {
    config_error("noise.kind", "per-regime noise needs threshold-gnp dynamics");
  }
  if (static_cast<int>(s.x0.size()) > std::max(dyn_order, 64)) {
    config_error("x0", "at most 64 values");
  }
}

// RFC 4180 field.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

// ---- scenarios ----

std::vector<std::string> scenario_ids() {
  return {"S1-tomorrow", "S1-last-day", "S1-all", "S2-lqr-vs-greedy", "S3-gnp", "S4-sysid"};
}

Scenario build_scenario(const std::string& id) {
  if (id == "S1-tomorrow") return s1(PatternKind::kTomorrow, id);
  if (id == "S1-last-day") return s1(PatternKind::kLastDay, id);
  if (id == "S1-all") return s1(PatternKind::kAll, id);
  if (id == "S2" || id == "S2-lqr-vs-greedy") return s2();
  if (id == "S3" || id == "S3-gnp") return s3();
  if (id == "S4" || id == "S4-sysid") return s4();
  if (id == "S1" || id == "S1-patterns") {
    throw Error(ErrorKind::kConfig, "id: S1 names three scenarios; use scenario_family()");
  }
  throw Error(ErrorKind::kConfig, "id: unknown scenario '" + id + "'");
}

std::vector<Scenario> scenario_family(const std::string& id) {
  if (id == "S1" || id == "S1-patterns") {
    return {build_scenario("S1-tomorrow"), build_scenario("S1-last-day"),
            build_scenario("S1-all")};
  }
  return {build_scenario(id)};
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) config_error("(root)", "expected an object");
  if (j.contains("schema_version")) {
    const int v = get_int(j["schema_version"], "schema_version", 0, 1 << 20);
    if (v != kSchemaVersion) {
      config_error("schema_version", "unsupported version " + std::to_string(v));
    }
  }
  const std::string id = get_string(require(j, "id", ""), "id");
  const bool custom = id == "custom";
  Scenario s = custom ? Scenario{} : build_scenario(id);
  s.id = id;

  auto field = [&](const char* key) -> const json* {
    if (j.contains(key)) return &j[key];
    if (custom) config_error(key, "missing required field");
    return nullptr;
  };

  static const char* kKnown[] = {"schema_version", "id",      "dynamics", "noise",
                                 "forecaster",     "pattern", "targets",  "lambda_tilde",
                                 "horizon",        "x0",      "trials",   "seed",
                                 "solver"};
  for (const auto& [key, v] : j.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      config_error(key, "unknown field");
    }
  }

  if (const json* v = field("dynamics")) s.dynamics = parse_dynamics(*v, "dynamics");
  if (const json* v = field("noise")) s.noise = parse_noise(*v, "noise");
  if (const json* v = field("forecaster")) s.forecaster = parse_forecaster(*v, "forecaster");
  if (const json* v = field("pattern")) s.pattern = parse_pattern(*v, "pattern");
  if (const json* v = field("targets")) s.targets = parse_targets(*v, "targets");
  if (const json* v = field("lambda_tilde")) s.lambda_tilde = get_double(*v, "lambda_tilde");
  if (const json* v = field("horizon")) s.horizon = get_int(*v, "horizon", 2, 100000);
  if (const json* v = field("x0")) s.x0 = get_doubles(*v, "x0");
  if (const json* v = field("trials")) s.trials = get_int(*v, "trials", 1, 10000000);
  if (const json* v = field("seed")) {
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
      config_error("seed", "expected a non-negative integer");
    }
    s.seed = v->get<std::uint64_t>();
  }
  if (j.contains("solver")) parse_solver(j["solver"], s.solver);
  check_ranges(s);
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["id"] = s.id;
  json dyn = {{"kind", dynamics_name(s.dynamics.kind)}};
  if (s.dynamics.kind == Dynamics::Kind::kLinear) dyn.update(coeffs_json(s.dynamics.coeffs));
  j["dynamics"] = dyn;
  json noise = {{"kind", noise_name(s.noise.kind)}};
  if (s.noise.kind == NoiseModel::Kind::kGaussian) noise["sigma"] = s.noise.sigma;
  if (s.noise.kind == NoiseModel::Kind::kPerRegime) noise["sigmas"] = s.noise.regime_sigmas;
  j["noise"] = noise;
  if (s.forecaster.kind == ForecasterSpec::Kind::kFixed) {
    json f = {{"kind", "fixed"}};
    f.update(coeffs_json(s.forecaster.coeffs));
    j["forecaster"] = f;
  } else {
    j["forecaster"] = {{"kind", "fit-on-prelude"},
                       {"order", s.forecaster.order},
                       {"prelude_length", s.forecaster.prelude_length},
                       {"fit_intercept", s.forecaster.fit_intercept}};
  }
  j["pattern"] = {{"kind", pattern_name(s.pattern.kind)},
                  {"first_decision", s.pattern.first_decision}};
  j["targets"] = {
      {"kind", s.targets.kind == TargetSpec::Kind::kConstant ? "constant" : "scaled-nominal"},
      {"value", s.targets.value}};
  j["lambda_tilde"] = s.lambda_tilde;
  j["horizon"] = s.horizon;
  j["x0"] = s.x0;
  j["trials"] = s.trials;
  j["seed"] = s.seed;
  j["solver"] = {{"mpc_lookahead", s.solver.mpc_lookahead},
                 {"ilqr_tol", s.solver.ilqr_tol},
                 {"ilqr_maxiter", s.solver.ilqr_maxiter},
                 {"sysid_buffer", s.solver.sysid_buffer},
                 {"sysid_order", s.solver.sysid_order},
                 {"sysid_lookahead", s.solver.sysid_lookahead},
                 {"oracle_lookahead", s.solver.oracle_lookahead}};
  return j;
}

// ---- instantiation ----

namespace {

Dynamics make_dynamics(const DynamicsSpec& d) {
  switch (d.kind) {
    case Dynamics::Kind::kLinear: return Dynamics::linear(d.coeffs);
    case Dynamics::Kind::kThresholdGnp: return Dynamics::threshold_gnp();
    case Dynamics::Kind::kRationalMap: return Dynamics::rational_map();
  }
  throw Error(ErrorKind::kConfig, "dynamics: unknown kind");
}

NoiseModel make_noise(const NoiseSpec& n, std::uint64_t seed) {
  switch (n.kind) {
    case NoiseModel::Kind::kNone: return NoiseModel::none().with_seed(seed);
    case NoiseModel::Kind::kGaussian: return NoiseModel::gaussian(n.sigma, seed);
    case NoiseModel::Kind::kPerRegime: return NoiseModel::per_regime(n.regime_sigmas, seed);
  }
  throw Error(ErrorKind::kConfig, "noise: unknown kind");
}

AttackPattern make_pattern(const PatternSpec& p, int horizon) {
  switch (p.kind) {
    case PatternKind::kTomorrow: return AttackPattern::tomorrow(horizon, p.first_decision);
    case PatternKind::kLastDay: return AttackPattern::last_day(horizon, p.first_decision);
    case PatternKind::kAll: return AttackPattern::all(horizon, p.first_decision);
    case PatternKind::kCustom: break;
  }
  throw Error(ErrorKind::kConfig, "pattern: custom patterns cannot be built from a scenario");
}

}  // namespace

ScenarioInstance instantiate(const Scenario& s) {
  check_ranges(s);
  Dynamics dyn = make_dynamics(s.dynamics);
  NoiseModel noise = make_noise(s.noise, s.seed);

  ArCoefficients fc = s.forecaster.coeffs;
  if (s.forecaster.kind == ForecasterSpec::Kind::kFitOnPrelude) {
    // Free-running sample of the environment, then OLS AR fit with intercept.
    const int d0 = std::max<int>(dyn.order(), static_cast<int>(s.x0.size()));
    const StateVector start = lift_state(s.x0, d0);
    ZeroControl zero;
    const Trajectory pre = simulate(dyn, noise.with_seed(s.seed + kPreludeSeedOffset), start, zero,
                                    s.forecaster.prelude_length);
    std::vector<double> series;
    for (const auto& x : pre.states) series.push_back(x.current());
    fc = fit_ar(series, s.forecaster.order, s.forecaster.fit_intercept);
  }

  const int d = std::max({dyn.order(), fc.order(), static_cast<int>(s.x0.size())});
  const StateVector x0 = lift_state(s.x0, d);
  const CompanionMatrix C = companion_matrix(fc, d);
  AttackPattern pattern = make_pattern(s.pattern, s.horizon);

  TargetSchedule targets;
  if (s.targets.kind == TargetSpec::Kind::kConstant) {
    targets = TargetSchedule::constant(pattern, s.targets.value);
  } else {
    ZeroControl zero;
    const Trajectory nominal = simulate(dyn, NoiseModel::none(), x0, zero, s.horizon);
    for (const auto& [key, beta] : pattern.entries()) {
      targets.set(key.first, key.second, s.targets.value * nominal.states[key.second].current());
    }
  }
  const double lambda = weight_lambda(s.lambda_tilde, pattern, s.horizon);
  AttackProblem problem(dyn, C, std::move(pattern), std::move(targets), lambda, s.horizon, x0);
  problem.validate();
  return {s, std::move(dyn), noise, std::move(problem)};
}

// ---- attackers ----

const char* to_string(Attacker a) {
  switch (a) {
    case Attacker::kNone: return "none";
    case Attacker::kLqr: return "lqr";
    case Attacker::kGreedy: return "greedy";
    case Attacker::kMpcIlqr: return "mpc-ilqr";
    case Attacker::kSysid: return "sysid";
    case Attacker::kOracle: return "oracle";
  }
  return "?";
}

Attacker attacker_from_string(const std::string& name) {
  for (Attacker a : {Attacker::kNone, Attacker::kLqr, Attacker::kGreedy, Attacker::kMpcIlqr,
                     Attacker::kSysid, Attacker::kOracle}) {
    if (name == to_string(a)) return a;
  }
  throw Error(ErrorKind::kConfig, "attackers: unknown attacker '" + name + "'");
}

std::vector<Attacker> parse_attackers(const std::string& comma_list) {
  std::vector<Attacker> out;
  std::stringstream ss(comma_list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const Attacker a = attacker_from_string(item);
    if (std::find(out.begin(), out.end(), a) != out.end()) {
      throw Error(ErrorKind::kConfig, "attackers: '" + item + "' listed twice");
    }
    out.push_back(a);
  }
  if (out.empty()) throw Error(ErrorKind::kConfig, "attackers: empty list");
  return out;
}

namespace {

IlqrConfig ilqr_config(const SolverParams& p) {
  IlqrConfig cfg;
  cfg.tol = p.ilqr_tol;
  cfg.maxiter = p.ilqr_maxiter;
  return cfg;
}

double noise_variance(const NoiseSpec& n) {
  return n.kind == NoiseModel::Kind::kGaussian ? n.sigma * n.sigma : 0.0;
}

void check_applicable(const Scenario& s, Attacker a) {
  if (a == Attacker::kLqr && s.dynamics.kind != Dynamics::Kind::kLinear) {
    throw Error(ErrorKind::kConfig,
                "attackers: lqr needs linear dynamics, scenario has " +
                    std::string(dynamics_name(s.dynamics.kind)));
  }
}

std::unique_ptr<ControlSource> make_controller(const ScenarioInstance& inst, Attacker a,
                                               const std::optional<LqrSolution>& lqr) {
  const Scenario& s = inst.scenario;
  const AttackProblem& pb = inst.problem;
  switch (a) {
    case Attacker::kNone: return std::make_unique<ZeroControl>();
    case Attacker::kLqr: {
      const LqrSolution* sol = &*lqr;
      return std::make_unique<FunctionControl>(
          [sol](int t, const StateVector& x) { return policy_action(sol->policy_at(t), x); });
    }
    case Attacker::kGreedy: return std::make_unique<GreedyController>(pb);
    case Attacker::kMpcIlqr:
      return std::make_unique<MpcController>(pb, s.solver.mpc_lookahead, ilqr_config(s.solver));
    case Attacker::kOracle:
      return std::make_unique<MpcController>(pb, s.solver.oracle_lookahead,
                                             ilqr_config(s.solver),
                                             s.solver.sysid_buffer + s.solver.sysid_order - 1);
    case Attacker::kSysid: {
      SysidConfig cfg{s.solver.sysid_order, s.solver.sysid_buffer, s.solver.sysid_lookahead};
      const CompanionMatrix C = pb.forecaster;
      return std::make_unique<SysidController>(
          cfg, pb.pattern, pb.targets, pb.lambda, pb.horizon,
          [C](const StateVector& x) { return forecast(C, x, 1); });
    }
  }
  throw Error(ErrorKind::kConfig, "attackers: unknown attacker");
}

}  // namespace

TrialResult run_trial(const ScenarioInstance& inst, const std::vector<Attacker>& attackers,
                      int trial) {
  const Scenario& s = inst.scenario;
  const AttackProblem& pb = inst.problem;
  TrialResult r;
  r.trial = trial;
  r.seed = trial_seed(s, trial);
  const NoiseModel noise = inst.noise.with_seed(r.seed);
  const std::vector<double> normals = standard_normals(noise, s.horizon);
  r.noise_hash = stream_hash(normals);

  std::optional<LqrSolution> lqr;
  for (Attacker a : attackers) {
    check_applicable(s, a);
    if (a == Attacker::kLqr && !lqr) lqr = solve_lqr(pb, noise_variance(s.noise));
  }

  for (Attacker a : attackers) {
    // Paired design: every attacker must be driven by the same draws.
    if (stream_hash(standard_normals(noise, s.horizon)) != r.noise_hash) {
      throw Error(ErrorKind::kSolverInstability, "noise stream is not reproducible");
    }
    auto ctrl = make_controller(inst, a, lqr);
    Trajectory traj = simulate(inst.dynamics, noise, normals, pb.x0, *ctrl, s.horizon);
    fill_forecasts(traj, pb.forecaster, pb.pattern);
    CostReport cost = realized_cost(traj, pb.forecaster, pb.pattern, pb.targets, pb.lambda);
    r.outcomes.push_back({a, cost, std::move(traj)});
  }
  return r;
}

std::vector<TrialResult> run_scenario(const Scenario& s, const std::vector<Attacker>& attackers,
                                      int threads) {
  if (attackers.empty()) throw Error(ErrorKind::kConfig, "attackers: empty list");
  for (Attacker a : attackers) check_applicable(s, a);
  const ScenarioInstance inst = instantiate(s);

  const int n = s.trials;
  std::vector<TrialResult> results(n);
  std::vector<std::exception_ptr> errors(n);
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, n);

  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        results[i] = run_trial(inst, attackers, i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

// ---- statistics ----

std::vector<double> totals_of(const std::vector<TrialResult>& results, Attacker a) {
  std::vector<double> out;
  out.reserve(results.size());
  for (const auto& r : results) {
    auto it = std::find_if(r.outcomes.begin(), r.outcomes.end(),
                           [a](const AttackerOutcome& o) { return o.attacker == a; });
    if (it == r.outcomes.end()) {
      throw Error(ErrorKind::kConfig, std::string("attacker ") + to_string(a) + " was not run");
    }
    out.push_back(it->cost.total);
  }
  return out;
}

SummaryStats summarize(const std::vector<TrialResult>& results) {
  if (results.size() < 2) {
    throw Error(ErrorKind::kInsufficientTrials, "need at least 2 trials to summarize");
  }
  SummaryStats st;
  std::vector<Attacker> order;
  for (const auto& o : results.front().outcomes) order.push_back(o.attacker);

  for (std::size_t k = 0; k < order.size(); ++k) {
    AttackerSummary a{order[k], {}, 0.0, 0.0};
    std::vector<double> totals;
    for (const auto& r : results) {
      const CostReport& c = r.outcomes.at(k).cost;
      totals.push_back(c.total);
      a.mean_tracking += c.tracking_cost;
      a.mean_control += c.control_cost;
    }
    a.total = mean_stderr(totals);
    a.mean_tracking /= static_cast<double>(results.size());
    a.mean_control /= static_cast<double>(results.size());
    st.attackers.push_back(a);
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const auto a = totals_of(results, order[i]);
      const auto b = totals_of(results, order[j]);
      st.comparisons.push_back({order[i], order[j], paired_t_test(a, b)});
    }
  }
  return st;
}

const AttackerSummary& SummaryStats::of(Attacker a) const {
  for (const auto& s : attackers) {
    if (s.attacker == a) return s;
  }
  throw Error(ErrorKind::kConfig, std::string("no summary for attacker ") + to_string(a));
}

const PairComparison& SummaryStats::compare(Attacker a, Attacker b) const {
  for (const auto& c : comparisons) {
    if ((c.first == a && c.second == b) || (c.first == b && c.second == a)) return c;
  }
  throw Error(ErrorKind::kConfig, std::string("no comparison ") + to_string(a) + " vs " +
                                      to_string(b));
}

// ---- output ----

json summary_to_json(const Scenario& s, const std::vector<TrialResult>& results,
                     const SummaryStats& stats) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["scenario"] = scenario_to_json(s);
  j["trials"] = results.size();
  json attackers = json::array();
  for (const auto& a : stats.attackers) {
    attackers.push_back({{"attacker", to_string(a.attacker)},
                         {"mean_total", num(a.total.mean)},
                         {"stderr_total", num(a.total.stderr_)},
                         {"mean_tracking", num(a.mean_tracking)},
                         {"mean_control", num(a.mean_control)},
                         {"n", a.total.n}});
  }
  j["attackers"] = attackers;
  json tests = json::array();
  for (const auto& c : stats.comparisons) {
    tests.push_back({{"first", to_string(c.first)},
                     {"second", to_string(c.second)},
                     {"mean_difference", num(c.test.mean_difference)},
                     {"t", num(c.test.t)},
                     {"p", num(c.test.p)},
                     {"dof", c.test.dof},
                     {"zero_variance", c.test.zero_variance}});
  }
  j["paired_t_tests"] = tests;
  json hashes = json::array();
  for (const auto& r : results) hashes.push_back(r.noise_hash);
  j["noise_hashes"] = hashes;
  return j;
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
  return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& p) {
  out.close();
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

}  // namespace

std::vector<std::filesystem::path> emit(const Scenario& s, const std::vector<TrialResult>& results,
                                        const SummaryStats& stats,
                                        const std::filesystem::path& dir,
                                        const EmitOptions& opts) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const std::string sid = csv_field(s.id);

  {
    const auto p = dir / "trials.csv";
    auto out = open_out(p);
    out << "scenario,trial,attacker,tracking_cost,control_cost,total\n";
    for (const auto& r : results) {
      for (const auto& o : r.outcomes) {
        out << sid << ',' << r.trial << ',' << to_string(o.attacker) << ','
            << fmt(o.cost.tracking_cost) << ',' << fmt(o.cost.control_cost) << ','
            << fmt(o.cost.total) << '\n';
      }
    }
    close_out(out, p);
    written.push_back(p);
  }
  {
    const auto p = dir / "summary.json";
    auto out = open_out(p);
    out << summary_to_json(s, results, stats).dump(2) << '\n';
    close_out(out, p);
    written.push_back(p);
  }
  if (opts.trajectories) {
    const ScenarioInstance inst = instantiate(s);
    const auto pt = dir / "trajectories.csv";
    const auto pf = dir / "forecasts.csv";
    auto tr = open_out(pt);
    auto fc = open_out(pf);
    tr << "scenario,trial,attacker,t,x,u,w\n";
    fc << "scenario,trial,attacker,t,t_prime,beta,forecast,target\n";
    for (const auto& r : results) {
      for (const auto& o : r.outcomes) {
        const Trajectory& traj = o.trajectory;
        const int T = traj.horizon();
        for (int t = 0; t <= T; ++t) {
          tr << sid << ',' << r.trial << ',' << to_string(o.attacker) << ',' << t << ','
             << fmt(traj.states[t].current()) << ',';
          if (t < T) tr << fmt(traj.controls[t]) << ',' << fmt(traj.noises[t]);
          else tr << ',';
          tr << '\n';
        }
        for (const auto& [key, y] : traj.forecasts) {
          fc << sid << ',' << r.trial << ',' << to_string(o.attacker) << ',' << key.first << ','
             << key.second << ',' << fmt(inst.problem.pattern.weight(key.first, key.second))
             << ',' << fmt(y) << ','
             << fmt(inst.problem.targets.at(key.first, key.second)) << '\n';
        }
      }
    }
    close_out(tr, pt);
    close_out(fc, pf);
    written.push_back(pt);
    written.push_back(pf);
  }
  return written;
}

}  // namespace arattack
