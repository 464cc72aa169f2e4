// Copyright 2026 The Evolve Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: run, sweep, oracle and validate.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "evolve/harness.h"
#include "evolve/io.h"
#include "evolve/oracle.h"
#include "evolve/solver.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitViolations = 1;

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw evolve::ConfigError("cannot write " + path.string());
  out << text;
}

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw evolve::ConfigError("not a number: " + item);
    }
  }
  return values;
}

struct LoadedConfig {
  evolve::Json json;
  fs::path base_dir;
};

LoadedConfig Load(const std::string& path) {
  return {evolve::ReadJsonFile(path), fs::path(path).parent_path()};
}

int Run(const std::string& config_path, const std::string& out_dir) {
  const LoadedConfig loaded = Load(config_path);
  evolve::ExperimentConfig config =
      evolve::ParseExperimentConfig(loaded.json, loaded.base_dir);
  config.strict_gamma = config.strict_gamma || evolve::StrictGammaFromEnv();
  const bool rounds = loaded.json.value("round_csv", true);
  config.keep_traces = rounds;
  const evolve::ExperimentResult result = evolve::RunExperiment(config);

  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  WriteFile(out / "summary.csv", evolve::SummaryCsv(result));
  WriteFile(out / "curve.csv", evolve::CurveCsv(result));
  if (rounds) WriteFile(out / "rounds.csv", evolve::RoundCsv(result));
  evolve::Json accuracy = evolve::AccuracyReportJson(result.accuracy);
  WriteFile(out / "accuracy.json", accuracy.dump(2) + "\n");

  for (const auto& warning : result.learner.warnings) {
    std::cerr << "warning: " << warning << '\n';
  }
  for (const auto& v : result.violations) {
    std::cerr << "violation: t=" << v.t << " tau=" << v.tau << " " << v.rule
              << ": " << v.detail << '\n';
  }
  std::cout << evolve::SummaryCsv(result);
  if (result.failures > 0) {
    std::cerr << result.failures
              << " episode(s) truncated: " << result.first_failure << '\n';
    return kExitNumeric;
  }
  return result.violations.empty() ? 0 : kExitViolations;
}

int SweepCommand(const std::string& config_path, const std::string& vary,
                 const std::string& out_dir) {
  const auto eq = vary.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw evolve::ConfigError("--vary expects <param>=<v1,v2,...>");
  }
  const LoadedConfig loaded = Load(config_path);
  const std::string csv = evolve::Sweep(
      loaded.json, vary.substr(0, eq),
      evolve::ParseSweepValues(vary.substr(eq + 1)), loaded.base_dir);
  fs::create_directories(out_dir);
  WriteFile(fs::path(out_dir) / "sweep.csv", csv);
  std::cout << csv;
  return 0;
}

int Validate(const std::string& trace_path) {
  const evolve::LoadedTrace loaded =
      evolve::TraceFromJson(evolve::ReadJsonFile(trace_path));
  const auto violations = evolve::ValidateTrace(loaded.trace, loaded.d_max);
  evolve::Json report;
  report["violations"] = evolve::Json::array();
  for (const auto& v : violations) {
    report["violations"].push_back(
        {{"t", v.t}, {"tau", v.tau}, {"rule", v.rule}, {"detail", v.detail}});
  }
  report["ok"] = violations.empty();
  std::cout << report.dump(2) << '\n';
  return violations.empty() ? 0 : kExitViolations;
}

evolve::ExperimentConfig LoadExperiment(const std::string& path) {
  const LoadedConfig loaded = Load(path);
  return evolve::ParseExperimentConfig(loaded.json, loaded.base_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online learning with evolving feedback"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--config", config_path)->required();
  run->add_option("--out", out_dir);

  std::string vary;
  auto* sweep = app.add_subcommand("sweep", "Vary one config parameter");
  sweep->add_option("--config", config_path)->required();
  sweep->add_option("--vary", vary, "<param>=<v1,v2,...>")->required();
  sweep->add_option("--out", out_dir);

  std::string trace_path;
  auto* validate = app.add_subcommand("validate", "Check a trace file");
  validate->add_option("--trace", trace_path)->required();

  auto* oracle = app.add_subcommand("oracle", "Reference computations");
  oracle->require_subcommand(1);

  std::string loss_list;
  double eta = 1.0;
  double barrier = 0.0;
  int resolution = 100;
  auto* argmin = oracle->add_subcommand("argmin", "Grid argmin vs solver");
  argmin->add_option("--L", loss_list, "cumulative losses, comma separated")
      ->required();
  argmin->add_option("--eta", eta);
  argmin->add_option("--barrier", barrier);
  argmin->add_option("--resolution", resolution);

  auto* best = oracle->add_subcommand("best-action", "Best fixed action");
  best->add_option("--config", config_path)->required();

  std::string probs_list;
  long long samples = 100000;
  std::uint64_t seed = 1;
  auto* mc = oracle->add_subcommand("mc", "Importance-estimate Monte Carlo");
  mc->add_option("--feedback", loss_list)->required();
  mc->add_option("--probs", probs_list)->required();
  mc->add_option("--samples", samples);
  mc->add_option("--seed", seed);

  auto* exhaustive =
      oracle->add_subcommand("exhaustive", "Exact expected regret, K^T <= 4096");
  exhaustive->add_option("--config", config_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return Run(config_path, out_dir);
    if (*sweep) return SweepCommand(config_path, vary, out_dir);
    if (*validate) return Validate(trace_path);
    if (*argmin) {
      const auto losses = ParseList(loss_list);
      const evolve::RegularizerParams params{eta, barrier};
      const auto grid = evolve::GridArgminSimplex(losses, params, resolution);
      const auto solved = evolve::Solve(losses, params);
      evolve::Json out{{"grid", grid.value},
                       {"solver", solved.probs},
                       {"kkt_residual", solved.residual},
                       {"converged", solved.converged}};
      std::cout << out.dump(2) << '\n';
      return solved.converged ? 0 : kExitNumeric;
    }
    if (*best) {
      const auto config = LoadExperiment(config_path);
      const auto commitment =
          evolve::Environment(config.environment).Materialize(config.memory_budget);
      const auto result = evolve::BestActionHindsight(*commitment);
      evolve::Json out{{"action", result.action + 1},
                       {"total_loss", result.total_loss}};
      std::cout << out.dump(2) << '\n';
      return 0;
    }
    if (*mc) {
      const auto result = evolve::McUnbiasedness(
          ParseList(loss_list), ParseList(probs_list), samples, seed);
      evolve::Json out{{"mean", result.mean},
                       {"standard_error", result.standard_error},
                       {"deviation_sigmas", result.deviation_sigmas},
                       {"samples", result.samples}};
      std::cout << out.dump(2) << '\n';
      return 0;
    }
    if (*exhaustive) {
      const auto config = LoadExperiment(config_path);
      const auto commitment =
          evolve::Environment(config.environment).Materialize(config.memory_budget);
      const evolve::AccuracyReport accuracy =
          evolve::ComputeAccuracy(*commitment);
      evolve::Environment env(config.environment);
      evolve::TuningContext context;
      context.num_actions = commitment->num_actions();
      context.horizon = commitment->horizon();
      context.evolution_horizon = env.EvolutionHorizon();
      context.accuracy = &accuracy;
      const auto learner = evolve::BuildLearner(config.learner, context);
      evolve::Json out{
          {"expected_regret", evolve::ExhaustiveRegretSmall(*commitment, *learner)}};
      std::cout << out.dump(2) << '\n';
      return 0;
    }
  } catch (const evolve::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const evolve::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
