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

#include "evolve/environment.h"

#include <gtest/gtest.h>

#include "evolve/metrics.h"

namespace evolve {
namespace {

EnvironmentSpec TableSpec(EnvironmentKind kind, std::vector<LossVector> table) {
  EnvironmentSpec spec;
  spec.kind = kind;
  spec.num_actions = static_cast<int>(table.front().size());
  spec.horizon = static_cast<int>(table.size());
  spec.base.type = BaseLossSpec::Type::kTable;
  spec.base.table = std::move(table);
  return spec;
}

TEST(EnvironmentTest, KindNamesRoundTrip) {
  for (auto kind : {EnvironmentKind::kScripted, EnvironmentKind::kDelayed,
                    EnvironmentKind::kOptimisticDelayed,
                    EnvironmentKind::kCorrupted, EnvironmentKind::kComposite,
                    EnvironmentKind::kNoisyDecay}) {
    EXPECT_EQ(KindFromName(KindName(kind)), kind);
  }
  EXPECT_THROW(KindFromName("adaptive"), ConfigError);
}

TEST(EnvironmentTest, DelayedRevealsAfterDelay) {
  auto spec = TableSpec(EnvironmentKind::kDelayed,
                        std::vector<LossVector>(6, {0.4, 0.9}));
  spec.delays = {3};
  const Environment env(spec);
  const int tau = 2;
  EXPECT_EQ(env.FeedbackLoss(tau + 1, tau), (LossVector{0.0, 0.0}));
  EXPECT_EQ(env.FeedbackLoss(tau + 3, tau), (LossVector{0.4, 0.9}));
  EXPECT_EQ(env.EvolutionHorizon(), 3);
}

TEST(EnvironmentTest, DelayedMaterializeMatchesQueries) {
  auto spec = TableSpec(EnvironmentKind::kDelayed,
                        {{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}});
  spec.delays = {1};
  const Environment env(spec);
  const auto c = env.Materialize();
  int entries = 0;
  for (int t = 1; t <= 3; ++t) {
    const auto truth = c->TrueLoss(t);
    EXPECT_EQ(LossVector(truth.begin(), truth.end()), env.TrueLoss(t));
    for (int tau = 1; tau <= t; ++tau, ++entries) {
      const auto f = c->Feedback(t, tau);
      EXPECT_EQ(LossVector(f.begin(), f.end()), env.FeedbackLoss(t, tau));
    }
  }
  EXPECT_EQ(entries, 6);
}

TEST(EnvironmentTest, PerRoundDelays) {
  auto spec = TableSpec(EnvironmentKind::kDelayed,
                        std::vector<LossVector>(4, {1.0}));
  spec.delays = {0, 2, 1, 0};
  const Environment env(spec);
  EXPECT_EQ(env.FeedbackLoss(1, 1)[0], 1.0);
  EXPECT_EQ(env.FeedbackLoss(3, 2)[0], 0.0);
  EXPECT_EQ(env.FeedbackLoss(4, 2)[0], 1.0);
  EXPECT_EQ(env.EvolutionHorizon(), 2);
}

TEST(EnvironmentTest, CompositePrefixSums) {
  EnvironmentSpec spec;
  spec.kind = EnvironmentKind::kComposite;
  spec.num_actions = 1;
  spec.horizon = 3;
  spec.composite_d = 2;
  spec.partials = std::vector<std::vector<LossVector>>(3, {{0.5}, {-0.2}});
  const Environment env(spec);
  const int tau = 1;
  EXPECT_DOUBLE_EQ(env.FeedbackLoss(tau, tau)[0], 0.5);
  EXPECT_DOUBLE_EQ(env.FeedbackLoss(tau + 1, tau)[0], 0.3);
  EXPECT_DOUBLE_EQ(env.FeedbackLoss(tau + 2, tau)[0], 0.3);
  EXPECT_DOUBLE_EQ(env.TrueLoss(tau)[0], 0.3);
  EXPECT_EQ(env.EvolutionHorizon(), 1);
  EXPECT_EQ(env.Partial(1, 2), (LossVector{-0.2}));
}

TEST(EnvironmentTest, CompositeRejectsPrefixOutsideUnitInterval) {
  EnvironmentSpec spec;
  spec.kind = EnvironmentKind::kComposite;
  spec.num_actions = 1;
  spec.horizon = 1;
  spec.composite_d = 2;
  spec.partials = {{{0.8}, {0.4}}};
  EXPECT_THROW(Environment{spec}, ConfigError);
}

TEST(EnvironmentTest, GeneratedCompositeHoldsPrefixInvariant) {
  for (auto mode : {CompositeMode::kPositive, CompositeMode::kNegative}) {
    EnvironmentSpec spec;
    spec.kind = EnvironmentKind::kComposite;
    spec.num_actions = 3;
    spec.horizon = 50;
    spec.seed = 11;
    spec.base.type = BaseLossSpec::Type::kUniform;
    spec.base.values = {0.0, 0.0, 0.0};
    spec.base.high = {1.0, 1.0, 1.0};
    spec.composite_d = 8;
    spec.composite_mode = mode;
    const Environment env(spec);
    bool negative = false;
    for (int t = 1; t <= spec.horizon; ++t) {
      LossVector prefix(3, 0.0);
      for (int s = 1; s <= 8; ++s) {
        const auto part = env.Partial(t, s);
        for (int i = 0; i < 3; ++i) {
          prefix[i] += part[i];
          negative = negative || part[i] < 0.0;
        }
        EXPECT_TRUE(InUnitCube(prefix));
      }
      for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(prefix[i], env.TrueLoss(t)[i], 1e-12);
      }
    }
    EXPECT_EQ(negative, mode == CompositeMode::kNegative);
  }
}

TEST(EnvironmentTest, CorruptedIsFrozenAndUnbounded) {
  auto spec = TableSpec(EnvironmentKind::kCorrupted,
                        {{0.0, 1.0}, {0.2, 0.2}, {1.0, 0.0}});
  spec.corrupted = {{0.5, 0.5}, {0.2, 0.2}, {0.0, 1.0}};
  const Environment env(spec);
  EXPECT_EQ(env.EvolutionHorizon(), kUnboundedHorizon);
  EXPECT_EQ(env.StabilizationLag(), 0);
  const auto c = env.Materialize();
  for (int tau = 1; tau <= 3; ++tau) {
    for (int t = tau; t <= 3; ++t) {
      const auto f = c->Feedback(t, tau);
      EXPECT_EQ(LossVector(f.begin(), f.end()), spec.corrupted[tau - 1]);
    }
  }
}

TEST(EnvironmentTest, CorruptionBudgetIsSpentExactly) {
  EnvironmentSpec spec;
  spec.kind = EnvironmentKind::kCorrupted;
  spec.num_actions = 2;
  spec.horizon = 100;
  spec.seed = 5;
  spec.base.type = BaseLossSpec::Type::kBernoulli;
  spec.base.values = {0.3, 0.7};
  for (auto placement : {CorruptionPlacement::kFront, CorruptionPlacement::kSpread}) {
    spec.placement = placement;
    spec.corruption_budget = 12.5;
    const auto c = Environment(spec).Materialize();
    EXPECT_NEAR(ComputeAccuracy(*c).corruption_budget, 12.5, 1e-12);
  }
}

TEST(EnvironmentTest, PerfectHintsAreAccurate) {
  EnvironmentSpec spec;
  spec.kind = EnvironmentKind::kOptimisticDelayed;
  spec.num_actions = 2;
  spec.horizon = 40;
  spec.seed = 3;
  spec.base.type = BaseLossSpec::Type::kUniform;
  spec.base.values = {0.0, 0.0};
  spec.base.high = {1.0, 1.0};
  spec.hint_delay = 4;
  spec.hint_noise = 0.0;
  const auto report = ComputeAccuracy(*Environment(spec).Materialize());
  EXPECT_EQ(report.D, 0.0);
  EXPECT_EQ(report.Lambda, 0.0);
}

TEST(EnvironmentTest, NoisyHintsSwitchToTruth) {
  EnvironmentSpec spec;
  spec.kind = EnvironmentKind::kOptimisticDelayed;
  spec.num_actions = 2;
  spec.horizon = 10;
  spec.seed = 3;
  spec.base.type = BaseLossSpec::Type::kConstant;
  spec.base.values = {0.5, 0.5};
  spec.hint_delay = 2;
  spec.hint_noise = 0.3;
  const Environment env(spec);
  EXPECT_NE(env.FeedbackLoss(3, 3), env.TrueLoss(3));
  EXPECT_EQ(env.FeedbackLoss(4, 3), env.FeedbackLoss(3, 3));
  EXPECT_EQ(env.FeedbackLoss(5, 3), env.TrueLoss(3));
}

TEST(EnvironmentTest, NoisyDecayCutsOff) {
  EnvironmentSpec spec;
  spec.kind = EnvironmentKind::kNoisyDecay;
  spec.num_actions = 2;
  spec.horizon = 10;
  spec.base.type = BaseLossSpec::Type::kConstant;
  spec.base.values = {0.5, 0.5};
  spec.noise_eps0 = 0.4;
  spec.noise_rho = 0.5;
  spec.noise_cutoff = 3;
  const Environment env(spec);
  EXPECT_NEAR(std::abs(env.FeedbackLoss(1, 1)[0] - 0.5), 0.4, 1e-15);
  EXPECT_NEAR(std::abs(env.FeedbackLoss(2, 1)[1] - 0.5), 0.2, 1e-15);
  EXPECT_EQ(env.FeedbackLoss(4, 1), env.TrueLoss(1));
  EXPECT_EQ(env.EvolutionHorizon(), 3);
}

TEST(EnvironmentTest, ScriptedDefaultsAndLatestRevision) {
  auto spec = TableSpec(EnvironmentKind::kScripted,
                        {{1.0, 0.0}, {0.5, 0.5}, {0.0, 1.0}});
  spec.scripted_feedback = {{1, 2, {0.9, 0.1}}, {1, 1, {0.2, 0.2}}};
  const Environment env(spec);
  EXPECT_EQ(env.FeedbackLoss(1, 1), (LossVector{0.2, 0.2}));
  EXPECT_EQ(env.FeedbackLoss(2, 1), (LossVector{0.9, 0.1}));
  EXPECT_EQ(env.FeedbackLoss(3, 1), (LossVector{0.9, 0.1}));
  EXPECT_EQ(env.FeedbackLoss(3, 2), (LossVector{0.0, 0.0}));
  spec.scripted_feedback.push_back({1, 2, {0.0, 0.0}});
  EXPECT_THROW(Environment{spec}, ConfigError);
}

TEST(EnvironmentTest, SameSeedIsBitIdentical) {
  EnvironmentSpec spec;
  spec.kind = EnvironmentKind::kComposite;
  spec.num_actions = 2;
  spec.horizon = 30;
  spec.seed = 17;
  spec.base.type = BaseLossSpec::Type::kBernoulli;
  spec.base.values = {0.4, 0.6};
  spec.composite_d = 4;
  const auto a = Environment(spec).Materialize();
  const auto b = Environment(spec).Materialize();
  for (int t = 1; t <= 30; ++t) {
    for (int tau = 1; tau <= t; ++tau) {
      const auto fa = a->Feedback(t, tau);
      const auto fb = b->Feedback(t, tau);
      EXPECT_TRUE(std::equal(fa.begin(), fa.end(), fb.begin()));
    }
  }
}

TEST(EnvironmentTest, DelayedLambdaBoundedByTotalDelay) {
  EnvironmentSpec spec;
  spec.kind = EnvironmentKind::kDelayed;
  spec.num_actions = 3;
  spec.horizon = 60;
  spec.seed = 2;
  spec.base.type = BaseLossSpec::Type::kUniform;
  spec.base.values = {0.0, 0.0, 0.0};
  spec.base.high = {1.0, 1.0, 1.0};
  spec.delays = {5};
  const auto report = ComputeAccuracy(*Environment(spec).Materialize());
  EXPECT_LE(report.Lambda, 5.0 * 60);
  EXPECT_LE(report.D, 5.0 * 60);
}

TEST(EnvironmentTest, MemoryBudgetIsReported) {
  auto spec = TableSpec(EnvironmentKind::kDelayed,
                        std::vector<LossVector>(100, {0.5, 0.5}));
  spec.delays = {50};
  EXPECT_THROW(Environment(spec).Materialize(1000), ConfigError);
}

TEST(EnvironmentTest, RejectsBadSpecs) {
  auto spec = TableSpec(EnvironmentKind::kDelayed, {{0.5, 1.5}});
  EXPECT_THROW(Environment{spec}, ConfigError);
  spec = TableSpec(EnvironmentKind::kDelayed, {{0.5, 0.5}});
  spec.delays = {-1};
  EXPECT_THROW(Environment{spec}, ConfigError);
}

}  // namespace
}  // namespace evolve
