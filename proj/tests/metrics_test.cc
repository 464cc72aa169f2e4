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

#include "evolve/metrics.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "evolve/environment.h"
#include "evolve/rng.h"

namespace evolve {
namespace {

// Random commitment with revisions at every lag (no freezing).
Commitment RandomCommitment(int k, int horizon, RngSeed seed) {
  Commitment c(k, horizon, horizon);
  Philox rng(seed, 0);
  for (int t = 1; t <= horizon; ++t) {
    for (auto& x : c.MutableTrueLoss(t)) x = rng.Uniform();
  }
  for (int tau = 1; tau <= horizon; ++tau) {
    for (int lag = 0; lag < c.StoredLags(tau); ++lag) {
      auto row = c.MutableRevision(tau, lag);
      for (int i = 0; i < k; ++i) {
        row[i] = rng.Uniform() < 0.3 ? c.TrueLoss(tau)[i] : rng.Uniform();
      }
    }
  }
  return c;
}

double Norm2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Direct transcription of the definitions, quadratic in T.
struct Reference {
  double D = 0.0;
  double Lambda = 0.0;
  std::vector<double> lambda_t;
};

Reference NaiveAccuracy(const Commitment& c) {
  Reference r;
  const int k = c.num_actions();
  for (int t = 1; t <= c.horizon(); ++t) {
    std::vector<double> le(k, 0.0), l(k, 0.0);
    double lam = 0.0;
    for (int tau = 1; tau < t; ++tau) {
      for (int i = 0; i < k; ++i) {
        le[i] += c.Feedback(t - 1, tau)[i];
        l[i] += c.TrueLoss(tau)[i];
      }
      const double x = Norm2(c.TrueLoss(tau), c.Feedback(t - 1, tau));
      lam += x / (1.0 + x);
    }
    double dist = 0.0;
    for (int i = 0; i < k; ++i) dist = std::max(dist, std::abs(le[i] - l[i]));
    r.D += dist;
    r.lambda_t.push_back(lam);
    for (int tau = 1; tau <= t; ++tau) {
      r.Lambda += std::min(1.0, Norm2(c.TrueLoss(tau), c.Feedback(t, tau)));
    }
  }
  return r;
}

TEST(MetricsTest, DelayedAllOnesHandUnrolled) {
  EnvironmentSpec spec;
  spec.kind = EnvironmentKind::kDelayed;
  spec.num_actions = 1;
  spec.horizon = 4;
  spec.base.type = BaseLossSpec::Type::kConstant;
  spec.base.values = {1.0};
  spec.delays = {2};
  const auto c = Environment(spec).Materialize();
  EXPECT_DOUBLE_EQ(InaccuracyD(*c), 5.0);
  const auto report = ComputeAccuracy(*c);
  EXPECT_DOUBLE_EQ(report.D, 5.0);
  EXPECT_EQ(report.D_partial, (std::vector<double>{0.0, 1.0, 3.0, 5.0}));
  EXPECT_EQ(report.d_max_observed, 1);
}

TEST(MetricsTest, LambdaCoefficientFormula) {
  const std::vector<double> truth = {1.0, 1.0, 1.0, 1.0};
  const std::vector<double> zero = {0.0, 0.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(LambdaCoefficient(truth, zero), 2.0 / 3.0);
  EXPECT_EQ(LambdaCoefficient(truth, truth), 0.0);
  EXPECT_THROW(LambdaCoefficient(truth, std::vector<double>{0.0}), ConfigError);
}

TEST(MetricsTest, MatchesNaiveDefinitions) {
  for (RngSeed seed = 1; seed <= 10; ++seed) {
    const Commitment c = RandomCommitment(3, 12, seed);
    const Reference ref = NaiveAccuracy(c);
    const AccuracyReport report = ComputeAccuracy(c);
    EXPECT_NEAR(report.D, ref.D, 1e-12);
    EXPECT_NEAR(report.Lambda, ref.Lambda, 1e-12);
    ASSERT_EQ(report.lambda_t.size(), ref.lambda_t.size());
    for (std::size_t t = 0; t < ref.lambda_t.size(); ++t) {
      EXPECT_NEAR(report.lambda_t[t], ref.lambda_t[t], 1e-12);
    }
    EXPECT_NEAR(LambdaTotal(c), ref.Lambda, 1e-12);
    EXPECT_NEAR(InaccuracyD(c), ref.D, 1e-12);
  }
}

TEST(MetricsTest, LambdaSumBoundedByLambda) {
  for (RngSeed seed = 20; seed < 40; ++seed) {
    const AccuracyReport report = ComputeAccuracy(RandomCommitment(2, 15, seed));
    EXPECT_LE(report.lambda_sum, report.Lambda);
    for (double v : report.lambda_t) {
      EXPECT_GE(v, 0.0);
    }
  }
}

TEST(MetricsTest, DelayedLambdaBelowDelay) {
  EnvironmentSpec spec;
  spec.kind = EnvironmentKind::kDelayed;
  spec.num_actions = 2;
  spec.horizon = 80;
  spec.seed = 4;
  spec.base.type = BaseLossSpec::Type::kBernoulli;
  spec.base.values = {0.5, 0.5};
  spec.delays = {6};
  const AccuracyReport report =
      ComputeAccuracy(*Environment(spec).Materialize());
  for (int t = 1; t <= spec.horizon; ++t) {
    EXPECT_LE(report.lambda_t[t - 1], std::min(6, t - 1));
  }
  EXPECT_LE(report.Lambda, 6.0 * spec.horizon);
}

TEST(MetricsTest, CorruptionBudgetSumsSupNorm) {
  const std::vector<LossVector> truth = {{0.0, 1.0}, {0.5, 0.5}};
  const std::vector<LossVector> seen = {{0.25, 1.0}, {0.5, 0.0}};
  EXPECT_DOUBLE_EQ(CorruptionBudget(truth, seen), 0.75);
}

TEST(MetricsTest, AccurateFeedbackIsZero) {
  Commitment c(2, 5, 0);
  for (int t = 1; t <= 5; ++t) {
    c.MutableTrueLoss(t)[0] = 0.3;
    c.MutableRevision(t, 0)[0] = 0.3;
  }
  const AccuracyReport report = ComputeAccuracy(c);
  EXPECT_EQ(report.D, 0.0);
  EXPECT_EQ(report.Lambda, 0.0);
  EXPECT_EQ(report.lambda_sum, 0.0);
  EXPECT_EQ(report.d_max_observed, 0);
  EXPECT_EQ(report.corruption_budget, 0.0);
}

}  // namespace
}  // namespace evolve
