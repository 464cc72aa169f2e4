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

#ifndef EVOLVE_CORE_H_
#define EVOLVE_CORE_H_

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Shared domain types for online learning with evolving feedback.
//
// Rounds are 1-based everywhere in this library (t = 1..T), matching the
// usual notation. Action indices are 0-based internally; every external
// interface (CSV, JSON, CLI) states its own convention.

namespace evolve {

// Thrown for malformed configurations and invalid arguments. The CLI maps it
// to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a numerical routine fails to meet its certificate. The CLI maps
// it to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One loss per action. True losses, feedback revisions and hints all live in
// [0,1]^K.
using LossVector = std::vector<double>;

inline constexpr int kUnboundedHorizon = std::numeric_limits<int>::max();

// Closed-interval check, no epsilon.
bool InUnitCube(std::span<const double> loss);

// Throws ConfigError when `loss` has the wrong length or leaves [0,1].
void CheckLossVector(std::span<const double> loss, int num_actions,
                     const std::string& what);

// A strictly positive probability vector summing to 1 within 1e-9.
class ActionDistribution {
 public:
  static constexpr double kSumTolerance = 1e-9;

  // Validates; throws NumericError on a violated invariant.
  explicit ActionDistribution(std::vector<double> probs);

  static ActionDistribution Uniform(int num_actions);

  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  // Inverse-CDF sampling in action-index order. `u` must lie in [0,1).
  int Sample(double u) const;

  // p . loss
  double Dot(std::span<const double> loss) const;

 private:
  std::vector<double> probs_;
};

// The adversary's revision at round `revision_round` of the loss of round
// `origin_round`.
struct FeedbackUpdate {
  int origin_round = 1;
  int revision_round = 1;
  LossVector loss;
};

// The adversary's full commitment: true losses plus every feedback revision.
//
// Revisions are stored per origin round for lags 0..window (the stored
// window); for lags past the window the last stored revision is repeated.
// Memory is O(T * (window + 1) * K).
class Commitment {
 public:
  // `window` is the number of lags stored after the origin round.
  Commitment(int num_actions, int horizon, int window);

  int num_actions() const { return num_actions_; }
  int horizon() const { return horizon_; }
  int window() const { return window_; }

  // Number of stored revisions for origin `tau` (lags 0..StoredLags-1).
  int StoredLags(int tau) const;

  std::span<const double> TrueLoss(int t) const;
  std::span<double> MutableTrueLoss(int t);

  // l_tau^(t) for 1 <= tau <= t <= T; frozen past the stored window.
  std::span<const double> Feedback(int t, int tau) const;
  // Stored revision at lag `lag` (< StoredLags(tau)).
  std::span<double> MutableRevision(int tau, int lag);
  std::span<const double> Revision(int tau, int lag) const;

  // Memory footprint in doubles for the given dimensions.
  static std::uint64_t FootprintDoubles(int num_actions, int horizon,
                                        int window);

 private:
  std::size_t RevisionOffset(int tau, int lag) const;

  int num_actions_;
  int horizon_;
  int window_;
  std::vector<double> true_losses_;
  std::vector<std::size_t> origin_offsets_;
  std::vector<double> revisions_;
};

// One episode: the shared adversary commitment plus what the agent did.
struct RunTrace {
  std::shared_ptr<const Commitment> commitment;
  std::uint64_t seed = 0;
  std::vector<int> actions;            // 0-based, one per completed round
  std::vector<double> sampling_probs;  // rounds x K, row-major
  bool truncated = false;
  std::string failure;

  int completed_rounds() const { return static_cast<int>(actions.size()); }
  std::span<const double> SamplingProbs(int t) const;
};

struct TraceViolation {
  int t = 0;
  int tau = 0;
  std::string rule;
  std::string detail;
};

// Checks loss ranges, the freezing rule for lags past `d_max` (skipped when
// d_max is kUnboundedHorizon), and every recorded sampling distribution.
// Violations are returned as data.
std::vector<TraceViolation> ValidateCommitment(const Commitment& commitment,
                                               int d_max);
std::vector<TraceViolation> ValidateTrace(const RunTrace& trace, int d_max);
// Only the agent side of a trace: actions and sampling distributions.
std::vector<TraceViolation> ValidatePlays(const RunTrace& trace);

}  // namespace evolve

#endif  // EVOLVE_CORE_H_
