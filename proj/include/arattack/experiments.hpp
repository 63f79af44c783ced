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

// Scenario harness: scenario configs (JSON), paired multi-trial runs of several
// attackers, summary statistics and CSV/JSON emission.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "arattack/core.hpp"
#include "arattack/environment.hpp"
#include "arattack/ilqr.hpp"
#include "arattack/problem.hpp"
#include "arattack/stats.hpp"

namespace arattack {

inline constexpr int kSchemaVersion = 1;

struct DynamicsSpec {
  Dynamics::Kind kind = Dynamics::Kind::kLinear;
  ArCoefficients coeffs;  // linear only
};

struct NoiseSpec {
  NoiseModel::Kind kind = NoiseModel::Kind::kNone;
  double sigma = 0.0;
  std::array<double, 4> regime_sigmas{};
};

struct ForecasterSpec {
  enum class Kind { kFixed, kFitOnPrelude };
  Kind kind = Kind::kFixed;
  ArCoefficients coeffs;  // kFixed
  int order = 1;          // kFitOnPrelude: AR order fit by OLS
  int prelude_length = 50;
  bool fit_intercept = true;  // kFitOnPrelude
};

struct PatternSpec {
  PatternKind kind = PatternKind::kTomorrow;
  int first_decision = 1;
};

struct TargetSpec {
  enum class Kind { kConstant, kScaledNominal };
  Kind kind = Kind::kConstant;
  /// kConstant: the target; kScaledNominal: factor applied to the noise-free,
  /// attack-free rollout, y^dagger_{t'|t} = value * xbar_{t'}.
  double value = 0.0;
};

struct SolverParams {
  int mpc_lookahead = 5;
  double ilqr_tol = 1e-4;
  int ilqr_maxiter = 1000;
  int sysid_buffer = 15;
  int sysid_order = 3;
  int sysid_lookahead = 5;
  int oracle_lookahead = 10;
};

struct Scenario {
  std::string id;
  DynamicsSpec dynamics;
  NoiseSpec noise;
  ForecasterSpec forecaster;
  PatternSpec pattern;
  TargetSpec targets;
  double lambda_tilde = 0.0;
  int horizon = 0;
  std::vector<double> x0;  // newest first: x_0, x_{-1}, ...
  int trials = 1;
  std::uint64_t seed = 0;
  SolverParams solver;
};

/// Ids accepted by build_scenario().
std::vector<std::string> scenario_ids();

/// Built-in scenario by id; "S1" is not a single scenario, see scenario_family().
/// Throws kConfig for unknown ids.
Scenario build_scenario(const std::string& id);

/// "S1" expands to its three pattern variants; every other id to itself.
std::vector<Scenario> scenario_family(const std::string& id);

/// Parses a config. A config with "id" naming a built-in scenario may override
/// any field; "custom" configs must give every field. Errors are kConfig with
/// the offending field path in the message.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

/// Everything a trial needs, derived deterministically from a Scenario.
struct ScenarioInstance {
  Scenario scenario;
  Dynamics dynamics;
  NoiseModel noise;  // seed = scenario seed; trials re-seed
  AttackProblem problem;
};

ScenarioInstance instantiate(const Scenario& s);

enum class Attacker { kNone, kLqr, kGreedy, kMpcIlqr, kSysid, kOracle };

const char* to_string(Attacker a);
Attacker attacker_from_string(const std::string& name);
std::vector<Attacker> parse_attackers(const std::string& comma_list);

struct AttackerOutcome {
  Attacker attacker;
  CostReport cost;
  Trajectory trajectory;
};

struct TrialResult {
  int trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t noise_hash = 0;
  std::vector<AttackerOutcome> outcomes;
};

/// Seed of trial i.
inline std::uint64_t trial_seed(const Scenario& s, int i) { return s.seed + static_cast<std::uint64_t>(i); }

/// Runs every attacker on every trial. Within a trial all attackers share the
/// same standard-normal draws. Trials run on `threads` worker threads (0 =
/// hardware concurrency); results are ordered by trial index regardless.
/// Throws kConfig for attackers that do not apply (lqr on nonlinear dynamics)
/// and DivergenceError if a rollout blows up.
std::vector<TrialResult> run_scenario(const Scenario& s, const std::vector<Attacker>& attackers,
                                      int threads = 0);

/// One trial; exposed for tests.
TrialResult run_trial(const ScenarioInstance& inst, const std::vector<Attacker>& attackers,
                      int trial);

struct AttackerSummary {
  Attacker attacker;
  MeanStderr total;
  double mean_tracking = 0.0;
  double mean_control = 0.0;
};

struct PairComparison {
  Attacker first;
  Attacker second;
  PairedTTest test;
};

struct SummaryStats {
  std::vector<AttackerSummary> attackers;
  std::vector<PairComparison> comparisons;  // every unordered pair, in run order

  const AttackerSummary& of(Attacker a) const;
  const PairComparison& compare(Attacker a, Attacker b) const;
};

/// Throws kInsufficientTrials for fewer than two trials.
SummaryStats summarize(const std::vector<TrialResult>& results);

/// Per-trial totals of one attacker, in trial order.
std::vector<double> totals_of(const std::vector<TrialResult>& results, Attacker a);

struct EmitOptions {
  bool trajectories = false;
};

/// Writes trials.csv, summary.json and, with trajectories, trajectories.csv and
/// forecasts.csv into `dir` (created if missing). Returns the files written.
std::vector<std::filesystem::path> emit(const Scenario& s, const std::vector<TrialResult>& results,
                                        const SummaryStats& stats,
                                        const std::filesystem::path& dir,
                                        const EmitOptions& opts = {});

nlohmann::json summary_to_json(const Scenario& s, const std::vector<TrialResult>& results,
                               const SummaryStats& stats);

}  // namespace arattack
