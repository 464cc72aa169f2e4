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

#include "evolve/harness.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

namespace evolve {
namespace {

struct SeedOutcome {
  std::vector<double> cumulative;
  std::string failure;
  std::vector<TraceViolation> violations;
  RunTrace trace;
};

// Running per-round mean and sum of squared deviations, updated in seed order.
struct Welford {
  std::vector<long long> count;
  std::vector<double> mean;
  std::vector<double> m2;

  explicit Welford(int horizon)
      : count(horizon, 0), mean(horizon, 0.0), m2(horizon, 0.0) {}

  void Add(const std::vector<double>& values) {
    for (std::size_t t = 0; t < values.size(); ++t) {
      ++count[t];
      const double delta = values[t] - mean[t];
      mean[t] += delta / static_cast<double>(count[t]);
      m2[t] += delta * (values[t] - mean[t]);
    }
  }

  double StandardError(std::size_t t) const {
    if (count[t] < 2) return 0.0;
    const double n = static_cast<double>(count[t]);
    return std::sqrt(m2[t] / (n - 1.0) / n);
  }
};

void Summarize(const Welford& acc, const std::vector<double>& finals,
               RegretCurve* curve) {
  curve->mean = acc.mean;
  curve->standard_error.resize(acc.mean.size());
  for (std::size_t t = 0; t < acc.mean.size(); ++t) {
    curve->standard_error[t] = acc.StandardError(t);
  }
  curve->final_regret = finals;
  if (finals.empty()) return;
  double mean = 0.0;
  for (double v : finals) mean += v;
  mean /= static_cast<double>(finals.size());
  double ss = 0.0;
  for (double v : finals) ss += (v - mean) * (v - mean);
  curve->mean_final = mean;
  const double n = static_cast<double>(finals.size());
  curve->stderr_final = finals.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
}

double ResolveBound(const LearnerConfig& config, const TuningContext& context,
                    bool lambda) {
  if (config.tune_bound) return *config.tune_bound;
  if (context.accuracy == nullptr) {
    throw ConfigError("measured tuning requested without an accuracy report");
  }
  return lambda ? context.accuracy->lambda_sum : context.accuracy->D;
}

}  // namespace

bool StrictGammaFromEnv() {
  const char* value = std::getenv("EVOLVE_STRICT_GAMMA");
  return value != nullptr && std::string(value) == "1";
}

std::unique_ptr<Learner> BuildLearner(const LearnerConfig& config,
                                      const TuningContext& context,
                                      LearnerDescription* description) {
  LearnerDescription local;
  LearnerDescription& desc = description != nullptr ? *description : local;
  const int k = context.num_actions;
  switch (config.algo) {
    case LearnerConfig::Algo::kEwa: {
      double eta;
      if (config.eta) {
        eta = *config.eta;
      } else if (config.tune == LearnerConfig::Tune::kDBar) {
        eta = k >= 2 ? TuneEwa(k, context.horizon,
                               ResolveBound(config, context, false))
                           .eta
                     : 1.0;
      } else {
        throw ConfigError("ewa needs eta or auto_tune.D_bar");
      }
      desc.name = "ewa";
      desc.eta = eta;
      return std::make_unique<EwaLearner>(k, eta);
    }
    case LearnerConfig::Algo::kFtrl: {
      RegularizerParams params;
      bool tuned = false;
      if (config.tune == LearnerConfig::Tune::kLambdaBar && k >= 2) {
        const FtrlTuning tuning =
            TuneFtrl(k, context.horizon, ResolveBound(config, context, true),
                     context.evolution_horizon);
        params = {tuning.eta, 1.0 / tuning.gamma};
        tuned = true;
      } else if (config.tune == LearnerConfig::Tune::kLambdaBar) {
        params = {1.0, 1.0};
        tuned = true;
      }
      if (config.eta) {
        params.eta = *config.eta;
      } else if (!tuned) {
        throw ConfigError("ftrl needs eta or auto_tune.Lambda_bar");
      }
      if (config.barrier) {
        params.barrier = *config.barrier;
      } else if (config.gamma) {
        if (!(*config.gamma > 0.0)) throw ConfigError("gamma must be > 0");
        params.barrier = 1.0 / *config.gamma;
      } else if (!tuned) {
        throw ConfigError("ftrl needs gamma, barrier or auto_tune.Lambda_bar");
      }
      params.Validate();
      // 1/sqrt(gamma) = sqrt(barrier).
      const int d_max = context.evolution_horizon;
      desc.condition_ok = params.barrier > 0.0 && d_max != kUnboundedHorizon &&
                          std::sqrt(params.barrier) >= 128.0 * (1.0 + d_max);
      if (!desc.condition_ok) {
        std::ostringstream os;
        os << "ftrl: 1/sqrt(gamma) = " << std::sqrt(params.barrier)
           << " is below 128 (1 + d_max) for d_max = "
           << (d_max == kUnboundedHorizon ? std::string("unbounded")
                                          : std::to_string(d_max));
        if (context.strict_gamma) throw ConfigError(os.str());
        desc.warnings.push_back(os.str());
      }
      desc.name = "ftrl";
      desc.eta = params.eta;
      desc.barrier = params.barrier;
      return std::make_unique<FtrlLearner>(k, params);
    }
    case LearnerConfig::Algo::kSkip: {
      if (!config.inner) throw ConfigError("skip needs an inner learner");
      const int window = config.d_max ? *config.d_max
                                      : DefaultSkipWindow(k, context.horizon);
      if (window < 0) throw ConfigError("skip d_max must be >= 0");
      TuningContext inner_context = context;
      inner_context.evolution_horizon =
          std::min(window, context.evolution_horizon);
      AccuracyReport skipped;
      if (context.commitment != nullptr &&
          config.inner->tune != LearnerConfig::Tune::kNone &&
          !config.inner->tune_bound) {
        skipped = ComputeAccuracy(*SkippedView(*context.commitment, window));
        inner_context.accuracy = &skipped;
      }
      inner_context.commitment = nullptr;
      auto inner = BuildLearner(*config.inner, inner_context, &desc);
      desc.name = "skip(" + desc.name + ")";
      desc.skip_window = window;
      return SkipWrap(std::move(inner), window);
    }
  }
  throw ConfigError("unknown learner");
}

void FillRoundFeedback(const Commitment& commitment, int t,
                       std::span<const int> actions, InformationModel model,
                       RoundFeedback* feedback) {
  const long long first =
      std::max<long long>(1, static_cast<long long>(t) - commitment.window());
  feedback->round = t;
  feedback->first_origin = static_cast<int>(first);
  feedback->rows.clear();
  feedback->scalars.clear();
  for (int tau = feedback->first_origin; tau <= t; ++tau) {
    const auto row = commitment.Feedback(t, tau);
    if (model == InformationModel::kFull) {
      feedback->rows.push_back(row);
    } else {
      feedback->scalars.push_back(row[actions[tau - 1]]);
    }
  }
}

std::shared_ptr<const Commitment> SkippedView(const Commitment& commitment,
                                              int d_max) {
  const int horizon = commitment.horizon();
  const int window = std::min(d_max, commitment.window());
  auto view = std::make_shared<Commitment>(commitment.num_actions(), horizon,
                                           window);
  for (int tau = 1; tau <= horizon; ++tau) {
    const long long frozen_at =
        std::min<long long>(static_cast<long long>(tau) + d_max, horizon);
    const auto reference = commitment.Feedback(static_cast<int>(frozen_at), tau);
    std::copy(reference.begin(), reference.end(),
              view->MutableTrueLoss(tau).begin());
    for (int lag = 0; lag < view->StoredLags(tau); ++lag) {
      const auto revision = commitment.Feedback(tau + lag, tau);
      std::copy(revision.begin(), revision.end(),
                view->MutableRevision(tau, lag).begin());
    }
  }
  return view;
}

RunTrace RunEpisode(std::shared_ptr<const Commitment> commitment,
                    Learner& learner, RngSeed seed) {
  RunTrace trace;
  trace.commitment = commitment;
  trace.seed = seed;
  const Commitment& c = *commitment;
  const int k = c.num_actions();
  const int horizon = c.horizon();
  if (learner.num_actions() != k) {
    throw ConfigError("learner and environment disagree on K");
  }
  trace.actions.reserve(horizon);
  trace.sampling_probs.reserve(static_cast<std::size_t>(horizon) * k);
  Philox rng(seed, static_cast<std::uint64_t>(Stream::kActions));
  RoundFeedback feedback;
  const InformationModel model = learner.information();
  for (int t = 1; t <= horizon; ++t) {
    try {
      const ActionDistribution p = learner.Act();
      const int a = p.Sample(rng.Uniform());
      trace.actions.push_back(a);
      trace.sampling_probs.insert(trace.sampling_probs.end(),
                                  p.probs().begin(), p.probs().end());
      FillRoundFeedback(c, t, trace.actions, model, &feedback);
      learner.Observe(a, feedback);
    } catch (const std::exception& e) {
      trace.truncated = true;
      trace.failure = "round " + std::to_string(t) + ": " + e.what();
      break;
    }
  }
  return trace;
}

std::vector<double> CumulativeRegret(const RunTrace& trace,
                                     const BestAction& comparator) {
  std::vector<double> out(trace.completed_rounds());
  double running = 0.0;
  for (int t = 1; t <= trace.completed_rounds(); ++t) {
    const auto loss = trace.commitment->TrueLoss(t);
    running += loss[trace.actions[t - 1]] - loss[comparator.action];
    out[t - 1] = running;
  }
  return out;
}

RegretCurve RegretSummary(std::span<const RunTrace> traces,
                          const Commitment& commitment) {
  if (traces.empty()) throw ConfigError("regret summary needs a trace");
  RegretCurve curve;
  curve.comparator = BestActionHindsight(commitment);
  Welford acc(commitment.horizon());
  std::vector<double> finals;
  for (const auto& trace : traces) {
    const auto cumulative = CumulativeRegret(trace, curve.comparator);
    acc.Add(cumulative);
    finals.push_back(cumulative.empty() ? 0.0 : cumulative.back());
  }
  Summarize(acc, finals, &curve);
  return curve;
}

double Cor1Bound(int num_actions, int horizon, double d_bar) {
  return std::sqrt(4.0 * std::log(static_cast<double>(num_actions)) *
                   (horizon / 2.0 + 2.0 * d_bar));
}

double Cor2Shape(int num_actions, int horizon, double lambda_bar,
                 double constant) {
  return constant *
         std::sqrt(static_cast<double>(num_actions) * horizon + lambda_bar) *
         std::log(static_cast<double>(horizon));
}

std::vector<double> BoundOverlay(BoundKind kind, int num_actions,
                                 const AccuracyReport& accuracy,
                                 double constant) {
  std::vector<double> out;
  if (kind == BoundKind::kNone) return out;
  const int horizon = static_cast<int>(accuracy.D_partial.size());
  out.resize(horizon);
  double lambda_prefix = 0.0;
  for (int t = 1; t <= horizon; ++t) {
    lambda_prefix += accuracy.lambda_t[t - 1];
    out[t - 1] = kind == BoundKind::kCor1
                     ? Cor1Bound(num_actions, t, accuracy.D_partial[t - 1])
                     : Cor2Shape(num_actions, t, lambda_prefix, constant);
  }
  return out;
}

namespace {

ExperimentResult Prepare(const ExperimentConfig& config) {
  if (config.seeds.empty()) throw ConfigError("experiment needs seeds");
  ExperimentResult result;
  const Environment env(config.environment);
  result.commitment = env.Materialize(config.memory_budget);
  result.evolution_horizon = env.EvolutionHorizon();
  result.accuracy = ComputeAccuracy(*result.commitment);
  if (config.validate) {
    result.violations =
        ValidateCommitment(*result.commitment, result.evolution_horizon);
  }
  return result;
}

SeedOutcome RunSeed(const ExperimentConfig& config,
                    const ExperimentResult& result,
                    const LearnerFactory& factory, RngSeed seed,
                    const BestAction& comparator) {
  SeedOutcome outcome;
  auto learner = factory();
  RunTrace trace = RunEpisode(result.commitment, *learner, seed);
  outcome.cumulative = CumulativeRegret(trace, comparator);
  outcome.failure = trace.failure;
  if (config.validate) outcome.violations = ValidatePlays(trace);
  if (config.keep_traces) outcome.trace = std::move(trace);
  return outcome;
}

void RunSeeds(const ExperimentConfig& config, const LearnerFactory& factory,
              ExperimentResult* result) {
  const Commitment& c = *result->commitment;
  const BestAction comparator = BestActionHindsight(c);
  result->regret.comparator = comparator;
  const std::size_t n = config.seeds.size();
  const std::size_t workers = std::max<std::size_t>(
      1, std::min<std::size_t>(std::thread::hardware_concurrency(), n));

  Welford acc(c.horizon());
  std::vector<double> finals;
  finals.reserve(n);
  std::vector<SeedOutcome> batch(workers);
  for (std::size_t start = 0; start < n; start += workers) {
    const std::size_t count = std::min(workers, n - start);
    if (count == 1) {
      batch[0] = RunSeed(config, *result, factory, config.seeds[start],
                         comparator);
    } else {
      std::vector<std::thread> threads;
      for (std::size_t j = 0; j < count; ++j) {
        threads.emplace_back([&, j] {
          batch[j] = RunSeed(config, *result, factory,
                             config.seeds[start + j], comparator);
        });
      }
      for (auto& thread : threads) thread.join();
    }
    // Reduce in seed order regardless of completion order.
    for (std::size_t j = 0; j < count; ++j) {
      SeedOutcome& outcome = batch[j];
      acc.Add(outcome.cumulative);
      finals.push_back(outcome.cumulative.empty() ? 0.0
                                                  : outcome.cumulative.back());
      if (!outcome.failure.empty()) {
        if (result->failures == 0) result->first_failure = outcome.failure;
        ++result->failures;
      }
      result->violations.insert(result->violations.end(),
                                outcome.violations.begin(),
                                outcome.violations.end());
      if (config.keep_traces) result->traces.push_back(std::move(outcome.trace));
    }
  }
  Summarize(acc, finals, &result->regret);

  const int k = c.num_actions();
  result->bound = BoundOverlay(config.bound, k, result->accuracy,
                               config.bound_constant);
  result->bound_cor1 = Cor1Bound(k, c.horizon(), result->accuracy.D);
  result->bound_cor2_shape = Cor2Shape(k, c.horizon(),
                                       result->accuracy.lambda_sum,
                                       config.bound_constant);
}

}  // namespace

ExperimentResult RunExperiment(const ExperimentConfig& config) {
  ExperimentResult result = Prepare(config);
  TuningContext context;
  context.num_actions = result.commitment->num_actions();
  context.horizon = result.commitment->horizon();
  context.evolution_horizon = result.evolution_horizon;
  context.accuracy = &result.accuracy;
  context.commitment = result.commitment.get();
  context.strict_gamma = config.strict_gamma || StrictGammaFromEnv();
  const std::unique_ptr<Learner> prototype =
      BuildLearner(config.learner, context, &result.learner);
  RunSeeds(config, [&] { return prototype->Clone(); }, &result);
  return result;
}

ExperimentResult RunExperiment(const ExperimentConfig& config,
                               const LearnerFactory& factory) {
  ExperimentResult result = Prepare(config);
  result.learner.name = factory()->name();
  RunSeeds(config, factory, &result);
  return result;
}

}  // namespace evolve
