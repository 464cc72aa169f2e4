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

#include "evolve/oracle.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "evolve/harness.h"

namespace evolve {
namespace {

double Gradient(double p, double loss, const RegularizerParams& params) {
  return loss + (std::log(p) + 1.0) / params.eta - params.barrier / p;
}

// Moves mass between coordinates i and j to the exact minimizer of the
// objective along that edge. The edge derivative is increasing in the shift,
// so bisection finds its zero.
void PairStep(std::vector<double>& p, std::size_t i, std::size_t j,
              std::span<const double> loss, const RegularizerParams& params) {
  const double total = p[i] + p[j];
  double lo = 0.0;
  double hi = total;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double slope =
        Gradient(mid, loss[i], params) - Gradient(total - mid, loss[j], params);
    if (slope < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  p[i] = 0.5 * (lo + hi);
  p[j] = total - p[i];
}

}  // namespace

OracleResult GridArgminSimplex(std::span<const double> cumulative_loss,
                               const RegularizerParams& params,
                               int resolution) {
  params.Validate();
  const std::size_t k = cumulative_loss.size();
  if (k < 1 || k > 4) throw ConfigError("grid oracle supports 1 <= K <= 4");
  if (resolution < 100) throw ConfigError("grid resolution must be >= 100");

  const double denom = resolution + 0.5 * static_cast<double>(k);
  std::vector<int> counts(k, 0);
  std::vector<double> point(k);
  std::vector<double> best(k, 1.0 / k);
  double best_value = std::numeric_limits<double>::infinity();

  // Enumerate compositions of `resolution` into k parts.
  std::function<void(std::size_t, int)> visit = [&](std::size_t i, int left) {
    if (i + 1 == k) {
      counts[i] = left;
      for (std::size_t j = 0; j < k; ++j) point[j] = (counts[j] + 0.5) / denom;
      const double value = Objective(point, cumulative_loss, params);
      if (value < best_value) {
        best_value = value;
        best = point;
      }
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[i] = c;
      visit(i + 1, left - c);
    }
  };
  visit(0, resolution);

  for (int sweep = 0; sweep < 200; ++sweep) {
    const std::vector<double> before = best;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        PairStep(best, i, j, cumulative_loss, params);
      }
    }
    if (before == best) break;
  }
  return {best, "barycentric grid + pairwise coordinate descent", resolution};
}

BestAction BestActionHindsight(std::span<const LossVector> true_losses) {
  if (true_losses.empty()) throw ConfigError("empty loss sequence");
  std::vector<double> totals(true_losses.front().size(), 0.0);
  for (const auto& row : true_losses) {
    for (std::size_t i = 0; i < totals.size(); ++i) totals[i] += row[i];
  }
  BestAction best{0, totals[0]};
  for (std::size_t i = 1; i < totals.size(); ++i) {
    if (totals[i] < best.total_loss) best = {static_cast<int>(i), totals[i]};
  }
  return best;
}

BestAction BestActionHindsight(const Commitment& commitment) {
  std::vector<LossVector> rows;
  rows.reserve(commitment.horizon());
  for (int t = 1; t <= commitment.horizon(); ++t) {
    const auto row = commitment.TrueLoss(t);
    rows.emplace_back(row.begin(), row.end());
  }
  return BestActionHindsight(rows);
}

MonteCarloEstimate McUnbiasedness(std::span<const double> feedback,
                                  std::span<const double> probs,
                                  long long samples, RngSeed seed) {
  if (feedback.size() != probs.size()) {
    throw ConfigError("feedback and distribution lengths differ");
  }
  if (samples < 2) throw ConfigError("need at least two samples");
  const ActionDistribution dist(
      std::vector<double>(probs.begin(), probs.end()));
  const std::size_t k = probs.size();
  std::vector<double> sum(k, 0.0), sum_sq(k, 0.0);
  Philox rng(seed, static_cast<std::uint64_t>(Stream::kActions));
  for (long long n = 0; n < samples; ++n) {
    const int a = dist.Sample(rng.Uniform());
    const double v = feedback[a] / probs[a];
    sum[a] += v;
    sum_sq[a] += v * v;
  }
  MonteCarloEstimate out;
  out.samples = samples;
  const double count = static_cast<double>(samples);
  for (std::size_t i = 0; i < k; ++i) {
    const double mean = sum[i] / count;
    const double var =
        std::max(0.0, (sum_sq[i] - count * mean * mean) / (count - 1.0));
    const double se = std::sqrt(var / count);
    const double gap = std::abs(mean - feedback[i]);
    out.mean.push_back(mean);
    out.standard_error.push_back(se);
    out.deviation_sigmas.push_back(
        se > 0.0 ? gap / se
                 : (gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity()));
  }
  return out;
}

double ExhaustiveRegretSmall(const Commitment& commitment,
                             const Learner& prototype) {
  const int k = commitment.num_actions();
  const int horizon = commitment.horizon();
  if (prototype.num_actions() != k) {
    throw ConfigError("learner and environment disagree on K");
  }
  double paths = 1.0;
  for (int t = 0; t < horizon; ++t) {
    paths *= k;
    if (paths > static_cast<double>(kMaxEnumeratedPaths)) {
      throw ConfigError("instance too large to enumerate (K^T > 4096)");
    }
  }

  std::vector<int> actions;
  RoundFeedback feedback;
  double expected_loss = 0.0;
  std::function<void(Learner&, double, double)> descend =
      [&](Learner& learner, double path_prob, double path_loss) {
        const int t = static_cast<int>(actions.size()) + 1;
        if (t > horizon) {
          expected_loss += path_prob * path_loss;
          return;
        }
        const ActionDistribution p = learner.Act();
        const auto truth = commitment.TrueLoss(t);
        for (int a = 0; a < k; ++a) {
          auto branch = learner.Clone();
          actions.push_back(a);
          FillRoundFeedback(commitment, t, actions, branch->information(),
                            &feedback);
          branch->Observe(a, feedback);
          descend(*branch, path_prob * p[a], path_loss + truth[a]);
          actions.pop_back();
        }
      };
  auto root = prototype.Clone();
  descend(*root, 1.0, 0.0);
  return expected_loss - BestActionHindsight(commitment).total_loss;
}

}  // namespace evolve
