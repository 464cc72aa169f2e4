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

#ifndef EVOLVE_SOLVER_H_
#define EVOLVE_SOLVER_H_

#include <span>
#include <vector>

#include "evolve/core.h"

// Minimizes p . L + Phi(p) over the probability simplex, where
//
//   Phi(p) = sum_i (p_i / eta) ln p_i  -  barrier * sum_i ln p_i
//
// i.e. negative entropy with learning rate eta plus a log barrier of weight
// barrier = 1 / gamma. barrier = 0 is the exponential-weights softmax.

namespace evolve {

struct RegularizerParams {
  double eta = 1.0;
  double barrier = 0.0;

  // Throws ConfigError unless eta > 0, barrier >= 0, both finite.
  void Validate() const;
};

// Caller-owned warm start: the stationarity level of the previous solve.
struct SolverWarmStart {
  bool valid = false;
  double level = 0.0;
};

struct SolveResult {
  std::vector<double> probs;
  double residual = 0.0;  // KktResidual of probs
  double sum_error = 0.0; // |sum p - 1| before the final normalization
  int outer_iterations = 0;
  bool converged = false;
};

inline constexpr int kMaxOuterIterations = 200;
inline constexpr int kMaxInnerIterations = 100;
inline constexpr double kSumTarget = 1e-10;
inline constexpr double kResidualTarget = 1e-8;

// p_i = exp(-eta L_i) / sum_j exp(-eta L_j), shifted by min L.
std::vector<double> Softmax(std::span<const double> cumulative_loss,
                            double eta);

// Never throws on non-convergence; the result carries the flag, the best
// iterate and its residual.
SolveResult Solve(std::span<const double> cumulative_loss,
                  const RegularizerParams& params,
                  SolverWarmStart* warm_start = nullptr);

// Certified solve: throws NumericError when Solve does not converge.
ActionDistribution SolveArgmin(std::span<const double> cumulative_loss,
                               const RegularizerParams& params,
                               SolverWarmStart* warm_start = nullptr);

// max_i |g_i - mean(g)| / (1 + |mean(g)|) with
// g_i = L_i + (ln p_i + 1) / eta - barrier / p_i. Throws NumericError if some
// p_i <= 0.
double KktResidual(std::span<const double> probs,
                   std::span<const double> cumulative_loss,
                   const RegularizerParams& params);

// p . L + Phi(p).
double Objective(std::span<const double> probs,
                 std::span<const double> cumulative_loss,
                 const RegularizerParams& params);

// Positive lower bound every optimal coordinate satisfies.
double BarrierFloor(std::span<const double> cumulative_loss,
                    const RegularizerParams& params);

}  // namespace evolve

#endif  // EVOLVE_SOLVER_H_
