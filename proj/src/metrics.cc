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

#include <algorithm>
#include <cmath>

namespace evolve {
namespace {

double Distance2(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

double DistanceInf(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

double MaxAbs(const std::vector<double>& v) {
  double worst = 0.0;
  for (double x : v) worst = std::max(worst, std::abs(x));
  return worst;
}

// Origin whose revision becomes final at revision round r, or 0.
int OriginFreezingAt(const Commitment& c, int r) {
  const long long tau = static_cast<long long>(r) - c.window();
  return tau >= 1 ? static_cast<int>(tau) : 0;
}

}  // namespace

double LambdaCoefficient(std::span<const double> truth,
                         std::span<const double> observed) {
  if (truth.size() != observed.size()) {
    throw ConfigError("lambda coefficient: length mismatch");
  }
  const double x = Distance2(observed, truth);
  return x / (1.0 + x);
}

double InaccuracyD(const Commitment& commitment) {
  return ComputeAccuracy(commitment).D;
}

std::vector<double> LambdaSchedule(const Commitment& commitment) {
  return ComputeAccuracy(commitment).lambda_t;
}

double LambdaTotal(const Commitment& commitment) {
  return ComputeAccuracy(commitment).Lambda;
}

double CorruptionBudget(std::span<const LossVector> truth,
                        std::span<const LossVector> corrupted) {
  if (truth.size() != corrupted.size()) {
    throw ConfigError("corruption budget: horizon mismatch");
  }
  double budget = 0.0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (truth[t].size() != corrupted[t].size()) {
      throw ConfigError("corruption budget: length mismatch");
    }
    budget += DistanceInf(truth[t], corrupted[t]);
  }
  return budget;
}

AccuracyReport ComputeAccuracy(const Commitment& c) {
  const int k = c.num_actions();
  const int horizon = c.horizon();
  AccuracyReport report;
  report.lambda_t.assign(horizon, 0.0);
  report.D_partial.assign(horizon, 0.0);

  // L^e_t - L_t and lambda_t are both sums over tau < t at revision round
  // t - 1; origins past the stored window contribute a frozen amount.
  std::vector<double> frozen_diff(k, 0.0);
  std::vector<double> diff(k);
  double frozen_lambda = 0.0;
  double running_d = 0.0;
  for (int t = 2; t <= horizon; ++t) {
    const int r = t - 1;
    const int freezing = OriginFreezingAt(c, r);
    if (freezing >= 1) {
      const auto revision = c.Feedback(r, freezing);
      const auto truth = c.TrueLoss(freezing);
      for (int i = 0; i < k; ++i) frozen_diff[i] += revision[i] - truth[i];
      frozen_lambda += LambdaCoefficient(truth, revision);
    }
    diff = frozen_diff;
    double lambda = frozen_lambda;
    for (int tau = std::max(1, freezing + 1); tau <= r; ++tau) {
      const auto revision = c.Feedback(r, tau);
      const auto truth = c.TrueLoss(tau);
      for (int i = 0; i < k; ++i) diff[i] += revision[i] - truth[i];
      lambda += LambdaCoefficient(truth, revision);
    }
    running_d += MaxAbs(diff);
    report.D_partial[t - 1] = running_d;
    report.lambda_t[t - 1] = lambda;
  }
  report.D = running_d;
  for (double v : report.lambda_t) report.lambda_sum += v;

  // Lambda sums over tau <= t at revision round t.
  double frozen_clip = 0.0;
  for (int t = 1; t <= horizon; ++t) {
    const int freezing = OriginFreezingAt(c, t);
    if (freezing >= 1) {
      frozen_clip +=
          std::min(1.0, Distance2(c.TrueLoss(freezing), c.Feedback(t, freezing)));
    }
    double total = frozen_clip;
    for (int tau = std::max(1, freezing + 1); tau <= t; ++tau) {
      total += std::min(1.0, Distance2(c.TrueLoss(tau), c.Feedback(t, tau)));
    }
    report.Lambda += total;
  }

  for (int tau = 1; tau <= horizon; ++tau) {
    const auto truth = c.TrueLoss(tau);
    const int last = c.StoredLags(tau) - 1;
    for (int lag = last; lag >= 0; --lag) {
      const auto revision = c.Revision(tau, lag);
      if (!std::equal(truth.begin(), truth.end(), revision.begin())) {
        const int observed = lag == last ? horizon - tau : lag;
        report.d_max_observed = std::max(report.d_max_observed, observed);
        break;
      }
    }
    report.corruption_budget += DistanceInf(truth, c.Feedback(horizon, tau));
  }
  return report;
}

}  // namespace evolve
