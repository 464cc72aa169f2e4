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

#include "evolve/solver.h"

#include <gtest/gtest.h>

#include <cmath>

#include "evolve/oracle.h"
#include "evolve/rng.h"

namespace evolve {
namespace {

// Reference values from a 40-digit bisection on the stationarity conditions.
TEST(SolverTest, MatchesHighPrecisionReference) {
  const std::vector<double> loss = {0.0, 1.0, 4.0};
  const auto result = Solve(loss, {0.1, 0.05});
  ASSERT_TRUE(result.converged);
  EXPECT_NEAR(result.probs[0], 0.38751344809082531, 1e-12);
  EXPECT_NEAR(result.probs[1], 0.35110610952215255, 1e-12);
  EXPECT_NEAR(result.probs[2], 0.26138044238702213, 1e-12);
  EXPECT_LE(result.residual, kResidualTarget);

  const auto grid = GridArgminSimplex(loss, {0.1, 0.05});
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(grid.value[i], result.probs[i], 1e-6);
}

TEST(SolverTest, SoftmaxClosedForm) {
  const std::vector<double> loss = {1.0, 3.0};
  const auto p = Softmax(loss, 0.5);
  EXPECT_NEAR(p[0], 0.7310585786300049, 1e-15);
  const auto solved = SolveArgmin(loss, {0.5, 0.0});
  EXPECT_NEAR(solved[0], 0.7310585786300049, 1e-15);
}

TEST(SolverTest, SingleActionIsDegenerate) {
  const std::vector<double> loss = {7.0};
  const auto result = Solve(loss, {0.3, 2.0});
  EXPECT_EQ(result.probs, std::vector<double>{1.0});
  EXPECT_TRUE(result.converged);
}

TEST(SolverTest, PerturbationRaisesResidual) {
  const std::vector<double> loss = {0.0, 1.0, 4.0};
  const RegularizerParams params{0.1, 0.05};
  auto p = Solve(loss, params).probs;
  EXPECT_LE(KktResidual(p, loss, params), 1e-8);
  p[0] += 1e-3;
  const double sum = p[0] + p[1] + p[2];
  for (double& x : p) x /= sum;
  EXPECT_GT(KktResidual(p, loss, params), 1e-5);
}

TEST(SolverTest, ResidualRejectsBoundary) {
  const std::vector<double> loss = {0.0, 1.0};
  const std::vector<double> p = {1.0, 0.0};
  EXPECT_THROW(KktResidual(p, loss, {1.0, 0.0}), NumericError);
}

TEST(SolverTest, RejectsInvalidParams) {
  const std::vector<double> loss = {0.0, 1.0};
  EXPECT_THROW(Solve(loss, {0.0, 0.1}), ConfigError);
  EXPECT_THROW(Solve(loss, {1.0, -0.1}), ConfigError);
  EXPECT_THROW(Solve(loss, {NAN, 0.1}), ConfigError);
}

TEST(SolverTest, ObjectiveIsMinimal) {
  const std::vector<double> loss = {2.0, 0.5, 1.0, 3.0};
  const RegularizerParams params{0.7, 0.3};
  const auto p = Solve(loss, params).probs;
  const double best = Objective(p, loss, params);
  Philox rng(4, 0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> q = p;
    const int i = static_cast<int>(rng.Uniform() * 4);
    const int j = (i + 1 + static_cast<int>(rng.Uniform() * 3)) % 4;
    const double step = 1e-3 * (rng.Uniform() - 0.5) * std::min(q[i], q[j]);
    q[i] += step;
    q[j] -= step;
    EXPECT_GE(Objective(q, loss, params), best - 1e-15);
  }
}

TEST(SolverTest, BarrierFloorHolds) {
  Philox rng(8, 0);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 2 + static_cast<int>(rng.Uniform() * 9);
    std::vector<double> loss(k);
    for (double& x : loss) x = 50.0 * rng.Uniform();
    const RegularizerParams params{1e-3 + rng.Uniform(), rng.Uniform()};
    const auto result = Solve(loss, params);
    ASSERT_TRUE(result.converged);
    const double floor = BarrierFloor(loss, params);
    for (double p : result.probs) EXPECT_GE(p, floor);
  }
}

TEST(SolverTest, ExtremeInstancesConverge) {
  const std::vector<std::vector<double>> losses = {
      {0.0, 1e4}, {0.0, 0.0, 0.0}, {1e6, 0.0, 5.0, 1e-9}};
  for (const auto& loss : losses) {
    for (double eta : {1e-4, 1.0, 50.0}) {
      for (double barrier : {0.0, 1e-9, 1e-3, 10.0}) {
        const auto result = Solve(loss, {eta, barrier});
        EXPECT_TRUE(result.converged)
            << "eta " << eta << " barrier " << barrier;
        double sum = 0.0;
        for (double p : result.probs) {
          EXPECT_GT(p, 0.0);
          sum += p;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
      }
    }
  }
}

TEST(SolverTest, WarmStartGivesSameAnswer) {
  SolverWarmStart warm;
  Philox rng(3, 0);
  std::vector<double> loss = {0.0, 0.0, 0.0};
  for (int round = 0; round < 50; ++round) {
    loss[static_cast<int>(rng.Uniform() * 3)] += 3.0 * rng.Uniform();
    const auto warm_result = Solve(loss, {0.2, 0.4}, &warm);
    const auto cold_result = Solve(loss, {0.2, 0.4});
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(warm_result.probs[i], cold_result.probs[i], 1e-12);
    }
  }
  EXPECT_TRUE(warm.valid);
}

}  // namespace
}  // namespace evolve
