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

#ifndef EVOLVE_HARNESS_H_
#define EVOLVE_HARNESS_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "evolve/core.h"
#include "evolve/environment.h"
#include "evolve/learners.h"
#include "evolve/metrics.h"
#include "evolve/oracle.h"
#include "evolve/rng.h"

namespace evolve {

// Learner configuration block. `tune_bound` empty with a tune mode set means
// "use the measured value of the environment".
struct LearnerConfig {
  enum class Algo { kEwa, kFtrl, kSkip };
  enum class Tune { kNone, kDBar, kLambdaBar };

  Algo algo = Algo::kEwa;
  std::optional<double> eta;
  std::optional<double> gamma;
  std::optional<double> barrier;  // overrides gamma; 0 is entropy only
  std::optional<int> d_max;       // skip only
  std::shared_ptr<LearnerConfig> inner;
  Tune tune = Tune::kNone;
  std::optional<double> tune_bound;
};

// What a learner may be tuned from: the problem size and adversary-side
// accuracy quantities.
struct TuningContext {
  int num_actions = 2;
  int horizon = 1;
  int evolution_horizon = 0;
  const AccuracyReport* accuracy = nullptr;
  // When set, a skip learner tunes a measured inner bound on the skipped view.
  const Commitment* commitment = nullptr;
  bool strict_gamma = false;
};

// Resolved parameters of a built learner, for reporting.
struct LearnerDescription {
  std::string name;
  double eta = 0.0;
  double barrier = 0.0;
  int skip_window = -1;
  bool condition_ok = true;
  std::vector<std::string> warnings;
};

// Throws ConfigError on an incomplete config, and when strict_gamma is set
// and the tuned barrier violates 1/sqrt(gamma) >= 128 (1 + d_max).
std::unique_ptr<Learner> BuildLearner(const LearnerConfig& config,
                                      const TuningContext& context,
                                      LearnerDescription* description = nullptr);

// True when EVOLVE_STRICT_GAMMA=1.
bool StrictGammaFromEnv();

// Round-t payload: origins max(1, t - window)..t of the commitment, where
// window is the commitment's stored window. Bandit payloads read the played
// coordinate of each origin from `actions` (0-based, actions[t-1] = a_t).
void FillRoundFeedback(const Commitment& commitment, int t,
                       std::span<const int> actions, InformationModel model,
                       RoundFeedback* feedback);

// The commitment as seen through a skipping wrapper with window d_max:
// revisions past lag d_max are replaced by l_tau^(tau + d_max), which also
// serves as the reference "true" loss (clamped to round T).
std::shared_ptr<const Commitment> SkippedView(const Commitment& commitment,
                                              int d_max);

// Plays one episode. Learner failures truncate the trace and are recorded in
// it rather than thrown.
RunTrace RunEpisode(std::shared_ptr<const Commitment> commitment,
                    Learner& learner, RngSeed seed);

struct RegretCurve {
  BestAction comparator;
  std::vector<double> mean;            // mean cumulative regret per round
  std::vector<double> standard_error;  // across seeds, per round
  std::vector<double> final_regret;    // per seed, in seed order
  double mean_final = 0.0;
  double stderr_final = 0.0;
};

// Realized regret against the best fixed action, averaged over traces.
// Truncated traces contribute only their completed rounds.
RegretCurve RegretSummary(std::span<const RunTrace> traces,
                          const Commitment& commitment);

// Per-seed cumulative realized regret.
std::vector<double> CumulativeRegret(const RunTrace& trace,
                                     const BestAction& comparator);

enum class BoundKind { kNone, kCor1, kCor2 };

// Bound aligned to rounds 1..T, from the measured accuracy prefixes.
// kCor1: sqrt(4 ln K (t/2 + 2 D(t))); exact constants.
// kCor2: c * sqrt(K t + sum_{s<=t} lambda_s) * ln t; shape only.
std::vector<double> BoundOverlay(BoundKind kind, int num_actions,
                                 const AccuracyReport& accuracy,
                                 double constant = 1.0);
// The same quantities at a given D_bar / Lambda_bar.
double Cor1Bound(int num_actions, int horizon, double d_bar);
double Cor2Shape(int num_actions, int horizon, double lambda_bar,
                 double constant = 1.0);

struct ExperimentConfig {
  EnvironmentSpec environment;
  LearnerConfig learner;
  std::vector<RngSeed> seeds;
  BoundKind bound = BoundKind::kNone;
  double bound_constant = 1.0;
  std::uint64_t memory_budget = Environment::kDefaultMemoryBudget;
  bool strict_gamma = false;
  bool keep_traces = false;
  bool validate = true;
};

struct ExperimentResult {
  std::shared_ptr<const Commitment> commitment;
  int evolution_horizon = 0;
  AccuracyReport accuracy;
  LearnerDescription learner;
  RegretCurve regret;
  std::vector<double> bound;  // per round, empty for kNone
  double bound_cor1 = 0.0;
  double bound_cor2_shape = 0.0;
  int failures = 0;
  std::string first_failure;
  std::vector<TraceViolation> violations;
  std::vector<RunTrace> traces;  // when keep_traces
};

// Builds the environment once, runs every seed (in parallel across seeds,
// reduced in seed order), and summarizes.
ExperimentResult RunExperiment(const ExperimentConfig& config);

// Same, with a caller-provided learner factory in place of config.learner.
using LearnerFactory = std::function<std::unique_ptr<Learner>()>;
ExperimentResult RunExperiment(const ExperimentConfig& config,
                               const LearnerFactory& factory);

}  // namespace evolve

#endif  // EVOLVE_HARNESS_H_
