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

#ifndef EVOLVE_ENVIRONMENT_H_
#define EVOLVE_ENVIRONMENT_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "evolve/core.h"
#include "evolve/rng.h"

namespace evolve {

enum class EnvironmentKind {
  kScripted,
  kDelayed,
  kOptimisticDelayed,
  kCorrupted,
  kComposite,
  kNoisyDecay,
};

std::string KindName(EnvironmentKind kind);
EnvironmentKind KindFromName(const std::string& name);

// Deterministic source of the true losses.
struct BaseLossSpec {
  enum class Type { kConstant, kBernoulli, kUniform, kTable };
  Type type = Type::kConstant;
  std::vector<double> values;  // constant value / Bernoulli mean / low bound
  std::vector<double> high;    // uniform upper bound
  std::vector<LossVector> table;
};

enum class CorruptionPlacement { kFront, kSpread };
enum class CompositeMode { kPositive, kNegative };

struct EnvironmentSpec {
  EnvironmentKind kind = EnvironmentKind::kDelayed;
  int num_actions = 2;
  int horizon = 1;
  RngSeed seed = 0;
  BaseLossSpec base;

  // delayed: one entry for a fixed delay, or one per round.
  std::vector<int> delays = {0};

  // optimistic_delayed: hints shown for `hint_delay` rounds, then the truth.
  int hint_delay = 0;
  double hint_noise = 0.0;
  std::vector<LossVector> hints;  // explicit hints override hint_noise

  // corrupted: explicit table, or a flip pattern with the given budget.
  std::vector<LossVector> corrupted;
  double corruption_budget = 0.0;
  CorruptionPlacement placement = CorruptionPlacement::kFront;

  // composite: d partial losses per round, explicit or generated.
  int composite_d = 1;
  CompositeMode composite_mode = CompositeMode::kPositive;
  double composite_amplitude = 0.5;
  std::vector<std::vector<LossVector>> partials;  // [t][s] -> K values

  // noisy_decay: clip(l + eps0 * rho^g * u, 0, 1) for lag g < cutoff.
  double noise_eps0 = 0.0;
  double noise_rho = 0.5;
  int noise_cutoff = 0;

  // scripted: (t, tau) revisions; missing pairs repeat the latest revision,
  // and (tau, tau) defaults to zeros.
  std::vector<FeedbackUpdate> scripted_feedback;
};

// An oblivious adversary. All losses are fixed at construction from the
// EnvironmentSpec and its seed; no query takes an agent action.
class Environment {
 public:
  static constexpr std::uint64_t kDefaultMemoryBudget = std::uint64_t{1} << 26;

  explicit Environment(EnvironmentSpec spec);

  const EnvironmentSpec& spec() const { return spec_; }
  EnvironmentKind kind() const { return spec_.kind; }
  int num_actions() const { return spec_.num_actions; }
  int horizon() const { return spec_.horizon; }

  // 1 <= t <= T.
  LossVector TrueLoss(int t) const;
  std::span<const double> TrueLossView(int t) const;

  // l_tau^(t) for 1 <= tau <= t <= T.
  LossVector FeedbackLoss(int t, int tau) const;
  void FeedbackLossInto(int t, int tau, std::span<double> out) const;

  // Smallest d after which feedback stops changing. kUnboundedHorizon for
  // corrupted feedback, which freezes immediately but never at the truth.
  int EvolutionHorizon() const;
  // Lag after which feedback is constant (0 for corrupted feedback). This is
  // the window a learner must track.
  int StabilizationLag() const;

  // Full commitment. Throws ConfigError when T * min(lag + 1, T) * K exceeds
  // `budget_doubles`.
  std::shared_ptr<const Commitment> Materialize(
      std::uint64_t budget_doubles = kDefaultMemoryBudget) const;

  // composite: partial loss s (1-based) of round t.
  LossVector Partial(int t, int s) const;

 private:
  void CheckRounds(int t, int tau) const;
  std::span<const double> Row(const std::vector<double>& table, int t) const;

  void BuildBase();
  void BuildDelayed();
  void BuildOptimistic();
  void BuildCorrupted();
  void BuildComposite();
  void BuildNoisy();
  void BuildScripted();

  EnvironmentSpec spec_;
  int lag_ = 0;
  std::vector<double> true_;      // T x K
  std::vector<double> side_;      // hints / corrupted losses / noise dirs
  std::vector<double> prefix_;    // composite: T x d x K prefix sums
  std::vector<int> delays_;       // per round
  // scripted: per origin, sorted (revision round, row into side_)
  std::vector<std::vector<std::pair<int, int>>> script_;
};

}  // namespace evolve

#endif  // EVOLVE_ENVIRONMENT_H_
