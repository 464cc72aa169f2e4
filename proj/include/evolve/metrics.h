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

#ifndef EVOLVE_METRICS_H_
#define EVOLVE_METRICS_H_

#include <span>
#include <vector>

#include "evolve/core.h"

// Feedback-accuracy quantities of an adversary commitment. None of these
// depend on the agent.

namespace evolve {

struct AccuracyReport {
  // sum_t || L^e_t - L_t ||_inf with L^e_t = sum_{tau<t} l_tau^(t-1).
  double D = 0.0;
  // sum_t sum_{tau<=t} min{1, || l_tau - l_tau^(t) ||_2}.
  double Lambda = 0.0;
  // lambda_t = sum_{tau<t} lambda_tau^(t-1), t = 1..T.
  std::vector<double> lambda_t;
  double lambda_sum = 0.0;
  // Prefix sums of D, one per round (D_partial[t-1] covers rounds 1..t).
  std::vector<double> D_partial;
  // Largest lag t - tau at which l_tau^(t) differs from l_tau (0 if none).
  int d_max_observed = 0;
  // sum_t || l_t - l_t^(T) ||_inf, the budget of the final view.
  double corruption_budget = 0.0;
};

// x / (1 + x) with x = || observed - truth ||_2. Throws ConfigError on a
// length mismatch.
double LambdaCoefficient(std::span<const double> truth,
                         std::span<const double> observed);

double InaccuracyD(const Commitment& commitment);
std::vector<double> LambdaSchedule(const Commitment& commitment);
double LambdaTotal(const Commitment& commitment);
double CorruptionBudget(std::span<const LossVector> truth,
                        std::span<const LossVector> corrupted);

AccuracyReport ComputeAccuracy(const Commitment& commitment);

}  // namespace evolve

#endif  // EVOLVE_METRICS_H_
