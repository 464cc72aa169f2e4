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

#include "evolve/harness.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

namespace evolve {
namespace {

class FixedLearner : public Learner {
 public:
  FixedLearner(int k, std::vector<double> probs, int fail_at = 0)
      : k_(k), probs_(std::move(probs)), fail_at_(fail_at) {}
  int num_actions() const override { return k_; }
  InformationModel information() const override {
    return InformationModel::kFull;
  }
  int round() const override { return round_; }
  ActionDistribution Act() override {
    if (round_ == fail_at_) throw NumericError("scheduled failure");
    return ActionDistribution(probs_);
  }
  void Observe(int, const RoundFeedback&) override { ++round_; }
  std::unique_ptr<Learner> Clone() const override {
    return std::make_unique<FixedLearner>(*this);
  }
  std::string name() const override { return "fixed"; }

 private:
  int k_;
  std::vector<double> probs_;
  int fail_at_;
  int round_ = 1;
};

ExperimentConfig ConstantConfig(LossVector values, int horizon, int seeds) {
  ExperimentConfig config;
  config.environment.kind = EnvironmentKind::kDelayed;
  config.environment.num_actions = static_cast<int>(values.size());
  config.environment.horizon = horizon;
  config.environment.base.values = std::move(values);
  for (int s = 1; s <= seeds; ++s) config.seeds.push_back(s);
  return config;
}

ExperimentConfig BernoulliConfig(int delay) {
  ExperimentConfig config;
  config.environment.kind = EnvironmentKind::kDelayed;
  config.environment.num_actions = 2;
  config.environment.horizon = 300;
  config.environment.seed = 3;
  config.environment.base.type = BaseLossSpec::Type::kBernoulli;
  config.environment.base.values = {0.4, 0.6};
  config.environment.delays = {delay};
  config.learner.algo = LearnerConfig::Algo::kEwa;
  config.learner.tune = LearnerConfig::Tune::kDBar;
  config.seeds = {1, 2, 3, 4, 5};
  config.keep_traces = true;
  return config;
}

TEST(HarnessTest, SingleActionHasZeroRegret) {
  ExperimentConfig config = ConstantConfig({0.7}, 50, 3);
  config.learner.eta = 0.5;
  const auto result = RunExperiment(config);
  for (double v : result.regret.mean) EXPECT_EQ(v, 0.0);
}

TEST(HarnessTest, UniformPolicyRegret) {
  // E[regret] = T (0.75 - 0.25) / 2 = 250.
  const ExperimentConfig config = ConstantConfig({0.25, 0.75}, 1000, 200);
  const auto result = RunExperiment(config, [] {
    return std::make_unique<FixedLearner>(2, std::vector<double>{0.5, 0.5});
  });
  EXPECT_NEAR(result.regret.mean_final, 250.0, 3 * result.regret.stderr_final);
  EXPECT_GT(result.regret.stderr_final, 0.0);
}

TEST(HarnessTest, OptimalPolicyHasZeroRegret) {
  const ExperimentConfig config = ConstantConfig({0.25, 0.75}, 100, 4);
  const auto result = RunExperiment(config, [] {
    return std::make_unique<FixedLearner>(2, std::vector<double>{1.0 - 1e-300, 1e-300});
  });
  EXPECT_EQ(result.regret.mean_final, 0.0);
}

TEST(HarnessTest, SameSeedSameTrace) {
  const ExperimentConfig config = BernoulliConfig(3);
  const auto a = RunExperiment(config);
  const auto b = RunExperiment(config);
  ASSERT_EQ(a.traces.size(), b.traces.size());
  for (std::size_t i = 0; i < a.traces.size(); ++i) {
    EXPECT_EQ(a.traces[i].actions, b.traces[i].actions);
    EXPECT_EQ(a.traces[i].sampling_probs, b.traces[i].sampling_probs);
  }
  EXPECT_EQ(a.regret.mean, b.regret.mean);
  EXPECT_NE(a.traces[0].actions, a.traces[1].actions);
}

TEST(HarnessTest, FailuresTruncateTraces) {
  ExperimentConfig config = ConstantConfig({0.25, 0.75}, 20, 2);
  config.keep_traces = true;
  const auto result = RunExperiment(config, [] {
    return std::make_unique<FixedLearner>(2, std::vector<double>{0.5, 0.5}, 7);
  });
  EXPECT_EQ(result.failures, 2);
  EXPECT_NE(result.first_failure.find("scheduled failure"), std::string::npos);
  EXPECT_TRUE(result.traces[0].truncated);
  EXPECT_EQ(result.traces[0].completed_rounds(), 6);
}

TEST(HarnessTest, TracesValidate) {
  for (int delay : {0, 4}) {
    const auto result = RunExperiment(BernoulliConfig(delay));
    EXPECT_TRUE(result.violations.empty());
    for (const auto& trace : result.traces) {
      EXPECT_TRUE(ValidateTrace(trace, result.evolution_horizon).empty());
    }
  }
}

TEST(HarnessTest, Cor1BoundValues) {
  EXPECT_NEAR(Cor1Bound(2, 128, 0.0), 13.320873778523164, 1e-12);
  EXPECT_NEAR(Cor1Bound(3, 1000, 50.0),
              std::sqrt(4 * std::log(3.0) * (500.0 + 100.0)), 1e-12);
  EXPECT_LT(Cor2Shape(2, 1000, 10.0), Cor2Shape(2, 1000, 20.0));
  EXPECT_DOUBLE_EQ(Cor2Shape(2, 1000, 0.0, 2.0),
                   2.0 * std::sqrt(2000.0) * std::log(1000.0));
}

TEST(HarnessTest, BoundOverlayEndsAtFinalBound) {
  const auto result = [] {
    ExperimentConfig config = BernoulliConfig(5);
    config.bound = BoundKind::kCor1;
    return RunExperiment(config);
  }();
  ASSERT_EQ(result.bound.size(), 300u);
  EXPECT_NEAR(result.bound.back(), Cor1Bound(2, 300, result.accuracy.D), 1e-12);
  for (std::size_t t = 1; t < result.bound.size(); ++t) {
    EXPECT_GE(result.bound[t], result.bound[t - 1]);
  }
}

TEST(HarnessTest, StrictGammaAborts) {
  ExperimentConfig config = BernoulliConfig(2);
  config.learner.algo = LearnerConfig::Algo::kFtrl;
  config.learner.tune = LearnerConfig::Tune::kLambdaBar;
  LearnerDescription description;
  TuningContext context;
  context.num_actions = 2;
  context.horizon = 300;
  context.evolution_horizon = 2;
  AccuracyReport accuracy;
  context.accuracy = &accuracy;
  BuildLearner(config.learner, context, &description);
  EXPECT_FALSE(description.condition_ok);
  EXPECT_EQ(description.warnings.size(), 1u);
  context.strict_gamma = true;
  EXPECT_THROW(BuildLearner(config.learner, context), ConfigError);
  config.strict_gamma = true;
  EXPECT_THROW(RunExperiment(config), ConfigError);
}

TEST(HarnessTest, StrictGammaEnvironmentVariable) {
  ::setenv("EVOLVE_STRICT_GAMMA", "1", 1);
  EXPECT_TRUE(StrictGammaFromEnv());
  ::setenv("EVOLVE_STRICT_GAMMA", "0", 1);
  EXPECT_FALSE(StrictGammaFromEnv());
  ::unsetenv("EVOLVE_STRICT_GAMMA");
}

TEST(HarnessTest, IncompleteLearnerConfigs) {
  TuningContext context;
  LearnerConfig ewa;
  EXPECT_THROW(BuildLearner(ewa, context), ConfigError);
  LearnerConfig ftrl;
  ftrl.algo = LearnerConfig::Algo::kFtrl;
  ftrl.eta = 0.1;
  EXPECT_THROW(BuildLearner(ftrl, context), ConfigError);
  LearnerConfig skip;
  skip.algo = LearnerConfig::Algo::kSkip;
  EXPECT_THROW(BuildLearner(skip, context), ConfigError);
}

TEST(HarnessTest, SkipTunesOnSkippedView) {
  ExperimentConfig config = BernoulliConfig(6);
  config.learner.algo = LearnerConfig::Algo::kSkip;
  config.learner.d_max = 2;
  config.learner.tune = LearnerConfig::Tune::kNone;
  auto inner = std::make_shared<LearnerConfig>();
  inner->algo = LearnerConfig::Algo::kEwa;
  inner->tune = LearnerConfig::Tune::kDBar;
  config.learner.inner = inner;
  const auto result = RunExperiment(config);
  const auto view = ComputeAccuracy(*SkippedView(*result.commitment, 2));
  EXPECT_DOUBLE_EQ(result.learner.eta, TuneEwa(2, 300, view.D).eta);
  EXPECT_EQ(result.learner.skip_window, 2);
  EXPECT_EQ(result.learner.name, "skip(ewa)");
}

TEST(HarnessTest, RejectsEmptySeeds) {
  ExperimentConfig config = BernoulliConfig(0);
  config.seeds.clear();
  EXPECT_THROW(RunExperiment(config), ConfigError);
}

}  // namespace
}  // namespace evolve
