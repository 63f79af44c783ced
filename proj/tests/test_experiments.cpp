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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "arattack/experiments.hpp"

namespace arattack {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

fs::path temp_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("arattack_test_" + name);
  fs::remove_all(d);
  return d;
}

Scenario small(const std::string& id, int trials) {
  Scenario s = build_scenario(id);
  s.trials = trials;
  return s;
}

TEST(BuildScenario, PatternFamilyHasConstantUnitTargets) {
  const auto fam = scenario_family("S1");
  ASSERT_EQ(fam.size(), 3u);
  EXPECT_EQ(fam[0].pattern.kind, PatternKind::kTomorrow);
  EXPECT_EQ(fam[1].pattern.kind, PatternKind::kLastDay);
  EXPECT_EQ(fam[2].pattern.kind, PatternKind::kAll);
  for (const auto& s : fam) {
    EXPECT_EQ(s.targets.kind, TargetSpec::Kind::kConstant);
    EXPECT_EQ(s.targets.value, 1.0);
    EXPECT_EQ(s.horizon, 10);
    EXPECT_EQ(s.lambda_tilde, 0.1);
    EXPECT_EQ(s.noise.sigma, 0.1);
  }
  EXPECT_THROW(build_scenario("S1"), Error);
  EXPECT_THROW(build_scenario("S9"), Error);
}

TEST(BuildScenario, ThresholdScenarioParameters) {
  const auto s = build_scenario("S3");
  EXPECT_EQ(s.dynamics.kind, Dynamics::Kind::kThresholdGnp);
  EXPECT_EQ(s.noise.kind, NoiseModel::Kind::kPerRegime);
  EXPECT_EQ(s.noise.regime_sigmas[0], 0.0062);
  EXPECT_EQ(s.noise.regime_sigmas[3], 0.0082);
  EXPECT_EQ(s.forecaster.coeffs.intercept, 0.0041);
  EXPECT_EQ(s.forecaster.coeffs.lags, (std::vector<double>{0.33, 0.13}));
  EXPECT_EQ(s.pattern.kind, PatternKind::kLastDay);
  EXPECT_EQ(s.targets.value, 0.01);
  EXPECT_EQ(s.lambda_tilde, 0.001);
  EXPECT_EQ(s.horizon, 10);
  EXPECT_EQ(s.x0, (std::vector<double>{0.0065, 0.0}));
  EXPECT_EQ(s.solver.mpc_lookahead, 5);
  EXPECT_EQ(s.trials, 50);
}

TEST(Instantiate, HalvedNominalTargets) {
  const auto inst = instantiate(build_scenario("S2"));
  ZeroControl zero;
  const auto nominal = simulate(inst.dynamics, NoiseModel::none(), inst.problem.x0, zero, 15);
  for (int t = 1; t < 15; ++t) {
    EXPECT_EQ(inst.problem.targets.at(t, t + 1), 0.5 * nominal.states[t + 1].current());
  }
  EXPECT_NEAR(inst.problem.lambda, 0.1, 1e-15);
  EXPECT_EQ(inst.problem.dim(), 3);
}

TEST(Instantiate, PreludeFitIsDeterministic) {
  const auto a = instantiate(build_scenario("S4"));
  const auto b = instantiate(build_scenario("S4"));
  EXPECT_EQ(a.problem.forecaster.matrix(), b.problem.forecaster.matrix());
  EXPECT_EQ(a.problem.forecaster(1, 0), 0.0);  // fit through the origin
  EXPECT_GT(a.problem.forecaster(1, 1), 0.5);
}

TEST(ScenarioJson, MissingLambdaIsFieldLevelError) {
  json j = scenario_to_json(build_scenario("S2"));
  j["id"] = "custom";
  EXPECT_NO_THROW(scenario_from_json(j));
  j.erase("lambda_tilde");
  try {
    scenario_from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    EXPECT_NE(std::string(e.what()).find("lambda_tilde"), std::string::npos);
  }
}

TEST(ScenarioJson, NestedFieldErrorsNameThePath) {
  auto expect_field = [](json j, const std::string& field) {
    try {
      scenario_from_json(j);
      FAIL() << field;
    } catch (const Error& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  expect_field({{"id", "S2"}, {"dynamics", {{"kind", "linear"}, {"intercept", 0}}}},
               "dynamics.lags");
  expect_field({{"id", "S2"}, {"noise", {{"kind", "gaussian"}, {"sigma", "x"}}}}, "noise.sigma");
  expect_field({{"id", "S2"}, {"horizon", 1}}, "horizon");
  expect_field({{"id", "S2"}, {"colour", 1}}, "colour");
  expect_field({{"id", "S2"}, {"solver", {{"mpc_lookahead", 0}}}}, "solver.mpc_lookahead");
  expect_field({{"id", "S2"}, {"schema_version", 99}}, "schema_version");
  expect_field({{"id", "S2"}, {"seed", -1}}, "seed");
  expect_field({{"id", "S9"}}, "id");
}

TEST(ScenarioJson, RoundTrip) {
  for (const auto& id : scenario_ids()) {
    const auto s = build_scenario(id);
    const json j = scenario_to_json(s);
    EXPECT_EQ(scenario_to_json(scenario_from_json(j)), j) << id;
    json c = j;
    c["id"] = "custom";
    EXPECT_EQ(scenario_to_json(scenario_from_json(c)).dump(), c.dump()) << id;
  }
}

TEST(ScenarioJson, OverridesApplyToBuiltIns) {
  const auto s = scenario_from_json({{"id", "S2"}, {"trials", 3}, {"seed", 99}});
  EXPECT_EQ(s.trials, 3);
  EXPECT_EQ(s.seed, 99u);
  EXPECT_EQ(s.horizon, 15);
}

TEST(Attackers, ParseList) {
  EXPECT_EQ(parse_attackers("none,lqr,greedy"),
            (std::vector<Attacker>{Attacker::kNone, Attacker::kLqr, Attacker::kGreedy}));
  EXPECT_THROW(parse_attackers("none,bogus"), Error);
  EXPECT_THROW(parse_attackers("lqr,lqr"), Error);
  EXPECT_THROW(parse_attackers(""), Error);
}

TEST(RunScenario, LqrRequiresLinearDynamics) {
  try {
    run_scenario(small("S3", 2), {Attacker::kLqr});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
}

TEST(RunScenario, NoAttackHasNoControlCost) {
  for (const char* id : {"S1-all", "S2", "S3", "S4"}) {
    const auto res = run_scenario(small(id, 3), {Attacker::kNone});
    for (const auto& r : res) {
      EXPECT_EQ(r.outcomes[0].cost.control_cost, 0.0);
      EXPECT_GT(r.outcomes[0].cost.tracking_cost, 0.0);
    }
  }
}

TEST(RunScenario, AttackersShareNoise) {
  const auto res =
      run_scenario(small("S2", 4), {Attacker::kNone, Attacker::kLqr, Attacker::kGreedy});
  std::set<std::uint64_t> hashes;
  for (const auto& r : res) {
    hashes.insert(r.noise_hash);
    for (const auto& o : r.outcomes) EXPECT_EQ(o.trajectory.noises, r.outcomes[0].trajectory.noises);
  }
  EXPECT_EQ(hashes.size(), 4u);
}

TEST(RunScenario, ThreadCountDoesNotChangeResults) {
  const auto s = small("S3", 6);
  const auto a = run_scenario(s, {Attacker::kNone, Attacker::kMpcIlqr}, 1);
  const auto b = run_scenario(s, {Attacker::kNone, Attacker::kMpcIlqr}, 4);
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(a[i].trial, i);
    for (int k = 0; k < 2; ++k) EXPECT_EQ(a[i].outcomes[k].cost.total, b[i].outcomes[k].cost.total);
  }
}

TEST(RunScenario, SingleTrialMatchesRunTrial) {
  const auto s = small("S2", 3);
  const auto all = run_scenario(s, {Attacker::kLqr});
  const auto one = run_trial(instantiate(s), {Attacker::kLqr}, 2);
  EXPECT_EQ(one.outcomes[0].cost.total, all[2].outcomes[0].cost.total);
  EXPECT_EQ(one.seed, s.seed + 2);
}

TEST(Summarize, NeedsTwoTrials) {
  const auto res = run_scenario(small("S2", 1), {Attacker::kNone});
  try {
    summarize(res);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInsufficientTrials);
  }
}

TEST(Summarize, AllPairsCompared) {
  const auto res =
      run_scenario(small("S2", 5), {Attacker::kNone, Attacker::kLqr, Attacker::kGreedy});
  const auto st = summarize(res);
  EXPECT_EQ(st.comparisons.size(), 3u);
  const auto& c = st.compare(Attacker::kGreedy, Attacker::kLqr);
  EXPECT_EQ(c.first, Attacker::kLqr);
  EXPECT_LT(c.test.mean_difference, 0.0);
  const auto totals = totals_of(res, Attacker::kLqr);
  EXPECT_EQ(st.of(Attacker::kLqr).total.mean, mean_stderr(totals).mean);
  for (const auto& p : st.comparisons) {
    EXPECT_GE(p.test.p, 0.0);
    EXPECT_LE(p.test.p, 1.0);
  }
}

TEST(Emit, DeterministicBytes) {
  const auto s = small("S3", 3);
  const std::vector<Attacker> att{Attacker::kNone, Attacker::kMpcIlqr, Attacker::kGreedy};
  const auto d1 = temp_dir("det1"), d2 = temp_dir("det2");
  for (const auto& d : {d1, d2}) {
    const auto res = run_scenario(s, att);
    emit(s, res, summarize(res), d, {true});
  }
  for (const char* f : {"trials.csv", "summary.json", "trajectories.csv", "forecasts.csv"}) {
    EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;
  }
}

TEST(Emit, SummaryEchoReproducesTotals) {
  const auto s = small("S4", 2);
  const auto d = temp_dir("echo");
  const auto res = run_scenario(s, {Attacker::kNone, Attacker::kSysid});
  emit(s, res, summarize(res), d);
  const json summary = json::parse(slurp(d / "summary.json"));
  EXPECT_EQ(summary["schema_version"], kSchemaVersion);
  const Scenario again = scenario_from_json(summary["scenario"]);
  const auto res2 = run_scenario(again, {Attacker::kNone, Attacker::kSysid});
  const auto rows = read_csv(d / "trials.csv");
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"scenario", "trial", "attacker", "tracking_cost",
                                               "control_cost", "total"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const int trial = std::stoi(rows[i][1]);
    const int k = rows[i][2] == "none" ? 0 : 1;
    EXPECT_EQ(std::stod(rows[i][5]), res2[trial].outcomes[k].cost.total);
  }
}

TEST(Emit, ForecastRowsExactlyAtWeightedPairs) {
  for (const char* id : {"S1-tomorrow", "S1-last-day", "S1-all"}) {
    const auto s = small(id, 2);
    const auto d = temp_dir(std::string("fc_") + id);
    const auto res = run_scenario(s, {Attacker::kLqr});
    emit(s, res, summarize(res), d, {true});
    const auto inst = instantiate(s);
    std::set<std::pair<int, int>> expected;
    for (const auto& [key, beta] : inst.problem.pattern.entries()) {
      if (key.first >= 1) expected.insert(key);
    }
    std::set<std::pair<int, int>> seen;
    const auto rows = read_csv(d / "forecasts.csv");
    EXPECT_EQ(rows[0], (std::vector<std::string>{"scenario", "trial", "attacker", "t", "t_prime",
                                                 "beta", "forecast", "target"}));
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i][1] != "0") continue;
      seen.insert({std::stoi(rows[i][3]), std::stoi(rows[i][4])});
      EXPECT_EQ(rows[i][7], "1");
    }
    EXPECT_EQ(seen, expected) << id;
  }
}

TEST(Emit, IdentificationPhaseIsPassive) {
  const auto s = small("S4", 2);
  const auto d = temp_dir("passive");
  const auto res = run_scenario(s, {Attacker::kSysid, Attacker::kOracle});
  emit(s, res, summarize(res), d, {true});
  const auto rows = read_csv(d / "trajectories.csv");
  int checked = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const int t = std::stoi(rows[i][3]);
    if (t <= 16) {
      EXPECT_EQ(rows[i][5], "0") << "t=" << t;
      ++checked;
    }
    if (t == 17 && rows[i][2] == "oracle") EXPECT_NE(rows[i][5], "0");
  }
  EXPECT_EQ(checked, 2 * 2 * 17);
}

TEST(Emit, CsvQuotesSpecialCharacters) {
  auto s = small("S2", 2);
  const auto res = run_scenario(s, {Attacker::kNone});
  s.id = "odd,\"name\"";
  const auto d = temp_dir("quote");
  emit(s, res, summarize(res), d);
  const auto text = slurp(d / "trials.csv");
  EXPECT_NE(text.find("\"odd,\"\"name\"\"\",0,none,"), std::string::npos);
}

TEST(Emit, GoldenMiniatureRun) {
  const fs::path golden = ARATTACK_GOLDEN_DIR;
  auto s = build_scenario("S2");
  s.trials = 2;
  s.seed = 7;
  const auto res = run_scenario(s, {Attacker::kNone, Attacker::kLqr, Attacker::kGreedy});
  const auto d = temp_dir("golden");
  emit(s, res, summarize(res), d);
  EXPECT_EQ(slurp(d / "trials.csv"), slurp(golden / "s2_two_trials" / "trials.csv"));
  EXPECT_EQ(slurp(d / "summary.json"), slurp(golden / "s2_two_trials" / "summary.json"));
}

}  // namespace
}  // namespace arattack
