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

#ifndef EVOLVE_ORACLE_H_
#define EVOLVE_ORACLE_H_

#include <span>
#include <string>
#include <vector>

#include "evolve/core.h"
#include "evolve/learners.h"
#include "evolve/rng.h"
#include "evolve/solver.h"

// Brute-force references, independent of the production code paths they are
// used to check.

namespace evolve {

struct OracleResult {
  std::vector<double> value;
  std::string method;
  long long resolution = 0;  // grid resolution or sample count
};

// Barycentric grid over the simplex interior (p_i = (k_i + 1/2) / (n + K/2),
// so every p_i >= 1/(2n)), then up to 200 sweeps of exact pairwise coordinate
// descent. Requires K <= 4 and resolution >= 100.
OracleResult GridArgminSimplex(std::span<const double> cumulative_loss,
                               const RegularizerParams& params,
                               int resolution = 100);

struct BestAction {
  int action = 0;  // 0-based; ties go to the lowest index
  double total_loss = 0.0;
};

BestAction BestActionHindsight(std::span<const LossVector> true_losses);
BestAction BestActionHindsight(const Commitment& commitment);

struct MonteCarloEstimate {
  std::vector<double> mean;
  std::vector<double> standard_error;
  // |mean - feedback| / standard_error per coordinate; 0 when both are 0.
  std::vector<double> deviation_sigmas;
  long long samples = 0;
};

// Mean of the importance-weighted estimate over a ~ p.
MonteCarloEstimate McUnbiasedness(std::span<const double> feedback,
                                  std::span<const double> probs,
                                  long long samples, RngSeed seed);

inline constexpr long long kMaxEnumeratedPaths = 4096;

// Exact expected regret of `prototype` (a fresh learner) against the
// commitment, by enumerating every action path. The learner is fed the same
// payload the episode runner builds. Requires K^T <= 4096.
double ExhaustiveRegretSmall(const Commitment& commitment,
                             const Learner& prototype);

}  // namespace evolve

#endif  // EVOLVE_ORACLE_H_
