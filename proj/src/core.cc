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

#include "evolve/core.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace evolve {

bool InUnitCube(std::span<const double> loss) {
  for (double v : loss) {
    if (!(v >= 0.0 && v <= 1.0)) return false;
  }
  return true;
}

void CheckLossVector(std::span<const double> loss, int num_actions,
                     const std::string& what) {
  if (static_cast<int>(loss.size()) != num_actions) {
    std::ostringstream os;
    os << what << ": expected " << num_actions << " entries, got "
       << loss.size();
    throw ConfigError(os.str());
  }
  if (!InUnitCube(loss)) throw ConfigError(what + ": entry outside [0,1]");
}

ActionDistribution::ActionDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) throw NumericError("empty action distribution");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw NumericError("action distribution has a non-positive entry");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "action distribution sums to " << sum;
    throw NumericError(os.str());
  }
}

ActionDistribution ActionDistribution::Uniform(int num_actions) {
  return ActionDistribution(
      std::vector<double>(num_actions, 1.0 / num_actions));
}

int ActionDistribution::Sample(double u) const {
  double cumulative = 0.0;
  for (int i = 0; i < size(); ++i) {
    cumulative += probs_[i];
    if (u < cumulative) return i;
  }
  // Rounding left u above the final partial sum.
  return size() - 1;
}

double ActionDistribution::Dot(std::span<const double> loss) const {
  double v = 0.0;
  for (int i = 0; i < size(); ++i) v += probs_[i] * loss[i];
  return v;
}

Commitment::Commitment(int num_actions, int horizon, int window)
    : num_actions_(num_actions), horizon_(horizon), window_(window) {
  if (num_actions < 1) throw ConfigError("K must be >= 1");
  if (horizon < 1) throw ConfigError("T must be >= 1");
  if (window < 0) throw ConfigError("stored window must be >= 0");
  true_losses_.assign(static_cast<std::size_t>(horizon) * num_actions, 0.0);
  origin_offsets_.resize(horizon + 1);
  std::size_t offset = 0;
  for (int tau = 1; tau <= horizon; ++tau) {
    origin_offsets_[tau - 1] = offset;
    offset += static_cast<std::size_t>(StoredLags(tau)) * num_actions;
  }
  origin_offsets_[horizon] = offset;
  revisions_.assign(offset, 0.0);
}

int Commitment::StoredLags(int tau) const {
  const long long remaining = static_cast<long long>(horizon_) - tau + 1;
  return static_cast<int>(
      std::min<long long>(static_cast<long long>(window_) + 1, remaining));
}

std::uint64_t Commitment::FootprintDoubles(int num_actions, int horizon,
                                           int window) {
  std::uint64_t lags = std::min<std::uint64_t>(
      static_cast<std::uint64_t>(window) + 1, horizon);
  return static_cast<std::uint64_t>(horizon) * (lags + 1) * num_actions;
}

std::span<const double> Commitment::TrueLoss(int t) const {
  if (t < 1 || t > horizon_) throw std::out_of_range("round out of range");
  return {true_losses_.data() + static_cast<std::size_t>(t - 1) * num_actions_,
          static_cast<std::size_t>(num_actions_)};
}

std::span<double> Commitment::MutableTrueLoss(int t) {
  if (t < 1 || t > horizon_) throw std::out_of_range("round out of range");
  return {true_losses_.data() + static_cast<std::size_t>(t - 1) * num_actions_,
          static_cast<std::size_t>(num_actions_)};
}

std::size_t Commitment::RevisionOffset(int tau, int lag) const {
  return origin_offsets_[tau - 1] +
         static_cast<std::size_t>(lag) * num_actions_;
}

std::span<const double> Commitment::Feedback(int t, int tau) const {
  if (tau < 1 || tau > t || t > horizon_) {
    throw std::out_of_range("feedback index out of range");
  }
  const int lag = std::min(t - tau, StoredLags(tau) - 1);
  return {revisions_.data() + RevisionOffset(tau, lag),
          static_cast<std::size_t>(num_actions_)};
}

std::span<double> Commitment::MutableRevision(int tau, int lag) {
  if (tau < 1 || tau > horizon_ || lag < 0 || lag >= StoredLags(tau)) {
    throw std::out_of_range("revision index out of range");
  }
  return {revisions_.data() + RevisionOffset(tau, lag),
          static_cast<std::size_t>(num_actions_)};
}

std::span<const double> Commitment::Revision(int tau, int lag) const {
  if (tau < 1 || tau > horizon_ || lag < 0 || lag >= StoredLags(tau)) {
    throw std::out_of_range("revision index out of range");
  }
  return {revisions_.data() + RevisionOffset(tau, lag),
          static_cast<std::size_t>(num_actions_)};
}

std::span<const double> RunTrace::SamplingProbs(int t) const {
  const std::size_t k = commitment->num_actions();
  return {sampling_probs.data() + static_cast<std::size_t>(t - 1) * k, k};
}

std::vector<TraceViolation> ValidateCommitment(const Commitment& commitment,
                                               int d_max) {
  std::vector<TraceViolation> violations;
  const int horizon = commitment.horizon();
  for (int t = 1; t <= horizon; ++t) {
    if (!InUnitCube(commitment.TrueLoss(t))) {
      violations.push_back({t, t, "range", "true loss outside [0,1]"});
    }
  }
  for (int tau = 1; tau <= horizon; ++tau) {
    const int lags = commitment.StoredLags(tau);
    for (int lag = 0; lag < lags; ++lag) {
      const auto revision = commitment.Revision(tau, lag);
      if (!InUnitCube(revision)) {
        violations.push_back(
            {tau + lag, tau, "range", "feedback loss outside [0,1]"});
      }
      if (d_max != kUnboundedHorizon && lag > d_max) {
        const auto frozen = commitment.Revision(tau, d_max);
        if (!std::equal(revision.begin(), revision.end(), frozen.begin())) {
          std::ostringstream os;
          os << "feedback(" << tau + lag << ", " << tau
             << ") differs from feedback(" << tau + d_max << ", " << tau
             << ") past d_max = " << d_max;
          violations.push_back({tau + lag, tau, "frozen-after-d_max",
                                os.str()});
        }
      }
    }
  }
  return violations;
}

std::vector<TraceViolation> ValidateTrace(const RunTrace& trace, int d_max) {
  if (!trace.commitment) {
    return {{0, 0, "structure", "trace has no commitment"}};
  }
  auto violations = ValidateCommitment(*trace.commitment, d_max);
  auto plays = ValidatePlays(trace);
  violations.insert(violations.end(), plays.begin(), plays.end());
  return violations;
}

std::vector<TraceViolation> ValidatePlays(const RunTrace& trace) {
  std::vector<TraceViolation> violations;
  const int k = trace.commitment->num_actions();
  if (trace.sampling_probs.size() !=
      static_cast<std::size_t>(trace.completed_rounds()) * k) {
    violations.push_back({0, 0, "structure",
                          "sampling probabilities do not match actions"});
    return violations;
  }
  for (int t = 1; t <= trace.completed_rounds(); ++t) {
    const int a = trace.actions[t - 1];
    if (a < 0 || a >= k) {
      violations.push_back({t, t, "action", "action index out of range"});
    }
    double sum = 0.0;
    bool positive = true;
    for (double p : trace.SamplingProbs(t)) {
      positive = positive && p > 0.0;
      sum += p;
    }
    if (!positive || std::abs(sum - 1.0) > ActionDistribution::kSumTolerance) {
      violations.push_back(
          {t, t, "distribution", "sampling distribution invalid"});
    }
  }
  return violations;
}

}  // namespace evolve
