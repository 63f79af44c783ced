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

// Command-line front end of the scenario harness.
//
//   arattack run --scenario S2 --attackers none,lqr,greedy --trials 50 --seed 7 --out DIR
//   arattack run --config FILE [--out DIR]
//   arattack list-scenarios
//   arattack validate CONFIG
//
// Exit codes: 0 success, 1 usage or I/O error, 2 config error, 3 numerical failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "arattack/experiments.hpp"

namespace {

constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw arattack::Error(arattack::ErrorKind::kConfig, "cannot read " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw arattack::Error(arattack::ErrorKind::kConfig, path + ": " + e.what());
  }
}

std::string default_attackers(const arattack::Scenario& s) {
  if (s.id.rfind("S1", 0) == 0) return "none,lqr,greedy";
  if (s.id.rfind("S2", 0) == 0) return "none,lqr,greedy";
  if (s.id.rfind("S3", 0) == 0) return "none,mpc-ilqr,greedy";
  if (s.id.rfind("S4", 0) == 0) return "none,sysid,oracle";
  return s.dynamics.kind == arattack::Dynamics::Kind::kLinear ? "none,lqr,greedy"
                                                              : "none,mpc-ilqr,greedy";
}

void print_summary(const arattack::Scenario& s, const arattack::SummaryStats& st) {
  std::cout << s.id << " (" << st.attackers.front().total.n << " trials, seed " << s.seed
            << ")\n";
  for (const auto& a : st.attackers) {
    std::cout << "  " << to_string(a.attacker) << ": mean " << a.total.mean << "  stderr "
              << a.total.stderr_ << '\n';
  }
  for (const auto& c : st.comparisons) {
    std::cout << "  " << to_string(c.first) << " vs " << to_string(c.second) << ": t " << c.test.t
              << "  p " << c.test.p << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal adversarial attacks on autoregressive forecasters"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario and write trials.csv and summary.json");
  std::string scenario_id;
  std::string config_path;
  std::string attackers;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  int threads = 0;
  bool trajectories = false;
  auto* opt_scenario = run->add_option("--scenario", scenario_id, "Built-in scenario id");
  auto* opt_config = run->add_option("--config", config_path, "Scenario config (JSON)");
  opt_scenario->excludes(opt_config);
  run->add_option("--attackers", attackers, "Comma-separated attackers");
  run->add_option("--trials", trials, "Override the trial count");
  run->add_option("--seed", seed, "Override the base seed");
  run->add_option("--out", out_dir, "Output directory (default $ARATTACK_OUT or ./out)");
  run->add_option("--threads", threads, "Worker threads (0 = all cores)");
  run->add_flag("--trajectories", trajectories, "Also write trajectories.csv and forecasts.csv");

  app.add_subcommand("list-scenarios", "List built-in scenario ids");

  auto* validate = app.add_subcommand("validate", "Check a scenario config");
  std::string validate_path;
  validate->add_option("config", validate_path, "Config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list-scenarios")) {
      for (const auto& id : arattack::scenario_ids()) std::cout << id << '\n';
      return 0;
    }
    if (app.got_subcommand("validate")) {
      const auto s = arattack::scenario_from_json(load_json(validate_path));
      arattack::instantiate(s);
      std::cout << "ok: " << s.id << '\n';
      return 0;
    }

    std::vector<arattack::Scenario> family;
    if (!config_path.empty()) {
      family.push_back(arattack::scenario_from_json(load_json(config_path)));
    } else if (!scenario_id.empty()) {
      family = arattack::scenario_family(scenario_id);
    } else {
      std::cerr << "run: give --scenario or --config\n";
      return kExitConfig;
    }
    if (out_dir.empty()) {
      const char* env = std::getenv("ARATTACK_OUT");
      out_dir = env && *env ? env : "out";
    }
    for (auto& s : family) {
      if (trials) s.trials = *trials;
      if (seed) s.seed = *seed;
      if (s.trials < 2) {
        std::cerr << "run: need at least 2 trials\n";
        return kExitConfig;
      }
      const auto list = arattack::parse_attackers(attackers.empty() ? default_attackers(s)
                                                                    : attackers);
      const auto results = arattack::run_scenario(s, list, threads);
      const auto stats = arattack::summarize(results);
      const std::filesystem::path dir =
          family.size() > 1 ? std::filesystem::path(out_dir) / s.id : std::filesystem::path(out_dir);
      arattack::emit(s, results, stats, dir, {trajectories});
      print_summary(s, stats);
      std::cout << "  wrote " << dir.string() << '\n';
    }
    return 0;
  } catch (const arattack::Error& e) {
    std::cerr << e.what() << '\n';
    switch (e.kind()) {
      case arattack::ErrorKind::kConfig:
      case arattack::ErrorKind::kSchedule:
      case arattack::ErrorKind::kUnsupportedPattern:
      case arattack::ErrorKind::kOrderOverflow:
      case arattack::ErrorKind::kZeroWeight:
      case arattack::ErrorKind::kInsufficientTrials:
        return kExitConfig;
      default:
        return kExitNumerical;
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitIo;
  }
}
