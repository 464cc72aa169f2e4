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

#ifndef EVOLVE_LEARNERS_H_
#define EVOLVE_LEARNERS_H_

#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evolve/core.h"
#include "evolve/solver.h"

namespace evolve {

enum class InformationModel { kFull, kBandit };

// What the agent observes after playing round `round`: the latest revisions
// for origins first_origin..round. Origins before first_origin are frozen at
// the last value previously delivered.
//
// Full information fills `rows` (one K-vector per origin). Bandit feedback
// fills `scalars` with l^(round)_{tau, a_tau}, the played coordinate only.
struct RoundFeedback {
  int round = 1;
  int first_origin = 1;
  std::vector<std::span<const double>> rows;
  std::vector<double> scalars;

  int num_origins() const { return round - first_origin + 1; }
};

// A round-by-round agent. Each round the caller invokes Act() once, samples
// an action from the returned distribution, then calls Observe().
class Learner {
 public:
  virtual ~Learner() = default;

  virtual int num_actions() const = 0;
  virtual InformationModel information() const = 0;
  // The round the next Act() is for (1-based).
  virtual int round() const = 0;
  virtual ActionDistribution Act() = 0;
  virtual void Observe(int action, const RoundFeedback& feedback) = 0;
  virtual std::unique_ptr<Learner> Clone() const = 0;
  virtual std::string name() const = 0;
};

// Evolving exponential weights (full information).
//
// L_e is rebuilt every round as frozen + sum over the live window, which
// performs the same floating-point additions, in the same order, as the sum
// over tau = 1..t from scratch.
class EwaLearner : public Learner {
 public:
  EwaLearner(int num_actions, double eta);

  int num_actions() const override { return num_actions_; }
  InformationModel information() const override {
    return InformationModel::kFull;
  }
  int round() const override { return round_; }
  ActionDistribution Act() override;
  void Observe(int action, const RoundFeedback& feedback) override;
  std::unique_ptr<Learner> Clone() const override {
    return std::make_unique<EwaLearner>(*this);
  }
  std::string name() const override { return "ewa"; }

  double eta() const { return eta_; }
  const std::vector<double>& estimate() const { return estimate_; }

 private:
  struct Entry {
    int origin;
    std::vector<double> loss;
  };

  int num_actions_;
  double eta_;
  int round_ = 1;
  std::vector<double> frozen_;
  std::vector<double> estimate_;
  std::deque<Entry> window_;
};

// Evolving FTRL with negative entropy plus log barrier (bandit feedback).
//
// Each played round keeps its action and the probability it was sampled with;
// revisions change the observed scalar, never that importance weight.
class FtrlLearner : public Learner {
 public:
  FtrlLearner(int num_actions, RegularizerParams params);

  int num_actions() const override { return num_actions_; }
  InformationModel information() const override {
    return InformationModel::kBandit;
  }
  int round() const override { return round_; }
  ActionDistribution Act() override;
  void Observe(int action, const RoundFeedback& feedback) override;
  std::unique_ptr<Learner> Clone() const override {
    return std::make_unique<FtrlLearner>(*this);
  }
  std::string name() const override { return "ftrl"; }

  const RegularizerParams& params() const { return params_; }
  const std::vector<double>& estimate() const { return estimate_; }
  // Sampling probability recorded for a live-window origin.
  std::optional<double> RecordedProbability(int origin) const;

 private:
  struct Entry {
    int origin;
    int action;
    double prob;
    double observed;
  };

  int num_actions_;
  RegularizerParams params_;
  int round_ = 1;
  std::vector<double> frozen_;
  std::vector<double> estimate_;
  std::deque<Entry> window_;
  std::optional<ActionDistribution> current_;
  SolverWarmStart warm_;
};

// One-hot at `action` with value observed / probs[action].
std::vector<double> ImportanceEstimate(double observed, int action,
                                       std::span<const double> probs);

// Skipping wrapper: forwards revisions of origin tau only while
// t <= tau + d_max, then keeps replaying l_tau^(tau + d_max).
class SkipLearner : public Learner {
 public:
  SkipLearner(std::unique_ptr<Learner> inner, int d_max);
  SkipLearner(const SkipLearner& other);

  int num_actions() const override { return inner_->num_actions(); }
  InformationModel information() const override {
    return inner_->information();
  }
  int round() const override { return inner_->round(); }
  ActionDistribution Act() override { return inner_->Act(); }
  void Observe(int action, const RoundFeedback& feedback) override;
  std::unique_ptr<Learner> Clone() const override {
    return std::make_unique<SkipLearner>(*this);
  }
  std::string name() const override { return "skip(" + inner_->name() + ")"; }

  int d_max() const { return d_max_; }
  const Learner& inner() const { return *inner_; }

 private:
  struct Entry {
    int origin;
    std::vector<double> loss;  // K values (full) or one scalar (bandit)
  };

  std::unique_ptr<Learner> inner_;
  int d_max_;
  std::deque<Entry> cache_;
};

std::unique_ptr<Learner> SkipWrap(std::unique_ptr<Learner> inner, int d_max);

struct EwaTuning {
  double eta;
  double bound;  // sqrt(4 ln K (T/2 + 2 D_bar))
};

// eta = sqrt(ln K / (T/2 + 2 D_bar)).
EwaTuning TuneEwa(int num_actions, int horizon, double d_bar);

struct FtrlTuning {
  double eta;
  double gamma;
  bool condition_ok;  // 1 / sqrt(gamma) >= 128 (1 + d_max)
};

// eta = 1 / sqrt(K T + Lambda_bar), gamma = eta K.
FtrlTuning TuneFtrl(int num_actions, int horizon, double lambda_bar,
                    int d_max);

// floor((T / K)^(1/4) / 4), the window the skipping wrapper defaults to.
int DefaultSkipWindow(int num_actions, int horizon);

}  // namespace evolve

#endif  // EVOLVE_LEARNERS_H_
