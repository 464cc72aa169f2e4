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

#include "evolve/learners.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace evolve {
namespace {

void CheckFeedbackShape(const RoundFeedback& feedback, int round,
                        InformationModel model, int num_actions) {
  if (feedback.round != round) {
    std::ostringstream os;
    os << "feedback for round " << feedback.round << " delivered at round "
       << round;
    throw ConfigError(os.str());
  }
  if (feedback.first_origin < 1 || feedback.first_origin > feedback.round) {
    throw ConfigError("feedback window must cover origins 1 <= tau <= t");
  }
  const auto n = static_cast<std::size_t>(feedback.num_origins());
  if (model == InformationModel::kFull) {
    if (feedback.rows.size() != n) {
      throw ConfigError("full-information feedback is missing window rows");
    }
    for (const auto& row : feedback.rows) {
      if (static_cast<int>(row.size()) != num_actions) {
        throw ConfigError("feedback row has the wrong length");
      }
    }
  } else if (feedback.scalars.size() != n) {
    throw ConfigError("bandit feedback is missing window entries");
  }
}

}  // namespace

EwaLearner::EwaLearner(int num_actions, double eta)
    : num_actions_(num_actions),
      eta_(eta),
      frozen_(num_actions, 0.0),
      estimate_(num_actions, 0.0) {
  if (num_actions < 1) throw ConfigError("K must be >= 1");
  RegularizerParams{eta, 0.0}.Validate();
}

ActionDistribution EwaLearner::Act() {
  return SolveArgmin(estimate_, RegularizerParams{eta_, 0.0});
}

void EwaLearner::Observe(int action, const RoundFeedback& feedback) {
  if (action < 0 || action >= num_actions_) {
    throw ConfigError("action index out of range");
  }
  CheckFeedbackShape(feedback, round_, InformationModel::kFull, num_actions_);
  window_.push_back({round_, std::vector<double>(num_actions_, 0.0)});
  while (window_.front().origin < feedback.first_origin) {
    const auto& loss = window_.front().loss;
    for (int i = 0; i < num_actions_; ++i) frozen_[i] += loss[i];
    window_.pop_front();
  }
  if (window_.front().origin != feedback.first_origin) {
    throw ConfigError("feedback revises an origin that is already frozen");
  }
  for (std::size_t j = 0; j < feedback.rows.size(); ++j) {
    const auto& row = feedback.rows[j];
    std::copy(row.begin(), row.end(), window_[j].loss.begin());
  }
  estimate_ = frozen_;
  for (const auto& entry : window_) {
    for (int i = 0; i < num_actions_; ++i) estimate_[i] += entry.loss[i];
  }
  ++round_;
}

FtrlLearner::FtrlLearner(int num_actions, RegularizerParams params)
    : num_actions_(num_actions),
      params_(params),
      frozen_(num_actions, 0.0),
      estimate_(num_actions, 0.0) {
  if (num_actions < 1) throw ConfigError("K must be >= 1");
  params_.Validate();
}

ActionDistribution FtrlLearner::Act() {
  current_ = SolveArgmin(estimate_, params_, &warm_);
  return *current_;
}

std::optional<double> FtrlLearner::RecordedProbability(int origin) const {
  for (const auto& entry : window_) {
    if (entry.origin == origin) return entry.prob;
  }
  return std::nullopt;
}

std::vector<double> ImportanceEstimate(double observed, int action,
                                       std::span<const double> probs) {
  if (action < 0 || action >= static_cast<int>(probs.size())) {
    throw ConfigError("action index out of range");
  }
  if (!(probs[action] > 0.0)) {
    throw NumericError("importance weight needs a positive probability");
  }
  std::vector<double> estimate(probs.size(), 0.0);
  estimate[action] = observed / probs[action];
  return estimate;
}

void FtrlLearner::Observe(int action, const RoundFeedback& feedback) {
  if (action < 0 || action >= num_actions_) {
    throw ConfigError("action index out of range");
  }
  if (!current_) {
    throw ConfigError("Observe called before Act for round " +
                      std::to_string(round_));
  }
  CheckFeedbackShape(feedback, round_, InformationModel::kBandit,
                     num_actions_);
  const double prob = (*current_)[action];
  if (!(prob > 0.0)) {
    throw NumericError("played action has zero sampling probability");
  }
  window_.push_back({round_, action, prob, 0.0});
  current_.reset();
  while (window_.front().origin < feedback.first_origin) {
    const auto& entry = window_.front();
    frozen_[entry.action] += entry.observed / entry.prob;
    window_.pop_front();
  }
  if (window_.front().origin != feedback.first_origin) {
    throw ConfigError("feedback revises a round that was never recorded");
  }
  for (std::size_t j = 0; j < feedback.scalars.size(); ++j) {
    window_[j].observed = feedback.scalars[j];
  }
  estimate_ = frozen_;
  for (const auto& entry : window_) {
    estimate_[entry.action] += entry.observed / entry.prob;
  }
  ++round_;
}

SkipLearner::SkipLearner(std::unique_ptr<Learner> inner, int d_max)
    : inner_(std::move(inner)), d_max_(d_max) {
  if (!inner_) throw ConfigError("skipping wrapper needs an inner learner");
  if (d_max < 0) throw ConfigError("skipping window must be >= 0");
}

SkipLearner::SkipLearner(const SkipLearner& other)
    : inner_(other.inner_->Clone()),
      d_max_(other.d_max_),
      cache_(other.cache_) {}

void SkipLearner::Observe(int action, const RoundFeedback& feedback) {
  const InformationModel model = information();
  CheckFeedbackShape(feedback, inner_->round(), model, num_actions());
  const int t = feedback.round;
  const long long oldest_live = static_cast<long long>(t) - d_max_;

  cache_.push_back({t, {}});
  for (int j = 0; j < feedback.num_origins(); ++j) {
    const int origin = feedback.first_origin + j;
    if (origin < oldest_live) continue;  // frozen at tau + d_max already
    const auto pos = static_cast<std::size_t>(origin - cache_.front().origin);
    auto& slot = cache_[pos].loss;
    if (model == InformationModel::kFull) {
      slot.assign(feedback.rows[j].begin(), feedback.rows[j].end());
    } else {
      slot.assign(1, feedback.scalars[j]);
    }
  }
  while (cache_.front().origin < oldest_live) cache_.pop_front();

  RoundFeedback forwarded;
  forwarded.round = t;
  forwarded.first_origin = cache_.front().origin;
  for (const auto& entry : cache_) {
    if (model == InformationModel::kFull) {
      forwarded.rows.emplace_back(entry.loss);
    } else {
      forwarded.scalars.push_back(entry.loss.at(0));
    }
  }
  inner_->Observe(action, forwarded);
}

std::unique_ptr<Learner> SkipWrap(std::unique_ptr<Learner> inner, int d_max) {
  return std::make_unique<SkipLearner>(std::move(inner), d_max);
}

EwaTuning TuneEwa(int num_actions, int horizon, double d_bar) {
  if (num_actions < 2) throw ConfigError("tuning needs K >= 2");
  if (horizon < 1) throw ConfigError("tuning needs T >= 1");
  if (!(d_bar >= 0.0)) throw ConfigError("D_bar must be >= 0");
  const double log_k = std::log(static_cast<double>(num_actions));
  const double scale = horizon / 2.0 + 2.0 * d_bar;
  return {std::sqrt(log_k / scale), std::sqrt(4.0 * log_k * scale)};
}

FtrlTuning TuneFtrl(int num_actions, int horizon, double lambda_bar,
                    int d_max) {
  if (num_actions < 2) throw ConfigError("tuning needs K >= 2");
  if (horizon < 1) throw ConfigError("tuning needs T >= 1");
  if (!(lambda_bar >= 0.0)) throw ConfigError("Lambda_bar must be >= 0");
  const double eta =
      1.0 / std::sqrt(static_cast<double>(num_actions) * horizon + lambda_bar);
  const double gamma = eta * num_actions;
  const bool ok = d_max != kUnboundedHorizon &&
                  1.0 / std::sqrt(gamma) >= 128.0 * (1.0 + d_max);
  return {eta, gamma, ok};
}

int DefaultSkipWindow(int num_actions, int horizon) {
  return static_cast<int>(std::floor(
      0.25 * std::pow(static_cast<double>(horizon) / num_actions, 0.25)));
}

}  // namespace evolve
