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

#include "evolve/environment.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace evolve {
namespace {

double Clip01(double v) { return std::clamp(v, 0.0, 1.0); }

void CheckTable(const std::vector<LossVector>& table, int rows, int k,
                const std::string& what) {
  if (static_cast<int>(table.size()) != rows) {
    std::ostringstream os;
    os << what << ": expected " << rows << " rows, got " << table.size();
    throw ConfigError(os.str());
  }
  for (std::size_t t = 0; t < table.size(); ++t) {
    CheckLossVector(table[t], k, what + " row " + std::to_string(t + 1));
  }
}

}  // namespace

std::string KindName(EnvironmentKind kind) {
  switch (kind) {
    case EnvironmentKind::kScripted: return "scripted";
    case EnvironmentKind::kDelayed: return "delayed";
    case EnvironmentKind::kOptimisticDelayed: return "optimistic_delayed";
    case EnvironmentKind::kCorrupted: return "corrupted";
    case EnvironmentKind::kComposite: return "composite";
    case EnvironmentKind::kNoisyDecay: return "noisy_decay";
  }
  return "unknown";
}

EnvironmentKind KindFromName(const std::string& name) {
  for (auto kind : {EnvironmentKind::kScripted, EnvironmentKind::kDelayed,
                    EnvironmentKind::kOptimisticDelayed,
                    EnvironmentKind::kCorrupted, EnvironmentKind::kComposite,
                    EnvironmentKind::kNoisyDecay}) {
    if (KindName(kind) == name) return kind;
  }
  throw ConfigError("unknown environment kind: " + name);
}

Environment::Environment(EnvironmentSpec spec) : spec_(std::move(spec)) {
  if (spec_.num_actions < 1) throw ConfigError("K must be >= 1");
  if (spec_.horizon < 1) throw ConfigError("T must be >= 1");
  BuildBase();
  switch (spec_.kind) {
    case EnvironmentKind::kScripted: BuildScripted(); break;
    case EnvironmentKind::kDelayed: BuildDelayed(); break;
    case EnvironmentKind::kOptimisticDelayed: BuildOptimistic(); break;
    case EnvironmentKind::kCorrupted: BuildCorrupted(); break;
    case EnvironmentKind::kComposite: BuildComposite(); break;
    case EnvironmentKind::kNoisyDecay: BuildNoisy(); break;
  }
  lag_ = std::min(lag_, spec_.horizon - 1);
}

void Environment::BuildBase() {
  const int k = spec_.num_actions;
  const int horizon = spec_.horizon;
  const BaseLossSpec& base = spec_.base;
  true_.assign(static_cast<std::size_t>(horizon) * k, 0.0);
  // Explicit partial schedules define the true losses themselves.
  if (spec_.kind == EnvironmentKind::kComposite && !spec_.partials.empty()) {
    return;
  }
  if (base.type == BaseLossSpec::Type::kTable) {
    CheckTable(base.table, horizon, k, "true losses");
    for (int t = 0; t < horizon; ++t) {
      std::copy(base.table[t].begin(), base.table[t].end(),
                true_.begin() + static_cast<std::size_t>(t) * k);
    }
    return;
  }
  if (static_cast<int>(base.values.size()) != k) {
    throw ConfigError("base loss parameters must have K entries");
  }
  if (!InUnitCube(base.values)) {
    throw ConfigError("base loss parameters must lie in [0,1]");
  }
  if (base.type == BaseLossSpec::Type::kUniform) {
    if (static_cast<int>(base.high.size()) != k || !InUnitCube(base.high)) {
      throw ConfigError("uniform base needs K upper bounds in [0,1]");
    }
    for (int i = 0; i < k; ++i) {
      if (base.high[i] < base.values[i]) {
        throw ConfigError("uniform base has high < low");
      }
    }
  }
  const auto stream = static_cast<std::uint64_t>(Stream::kBaseLosses);
  for (int t = 0; t < horizon; ++t) {
    for (int i = 0; i < k; ++i) {
      const std::size_t idx = static_cast<std::size_t>(t) * k + i;
      switch (base.type) {
        case BaseLossSpec::Type::kConstant:
          true_[idx] = base.values[i];
          break;
        case BaseLossSpec::Type::kBernoulli:
          true_[idx] =
              CounterUniform(spec_.seed, stream, idx) < base.values[i] ? 1.0
                                                                       : 0.0;
          break;
        case BaseLossSpec::Type::kUniform: {
          const double u = CounterUniform(spec_.seed, stream, idx);
          true_[idx] = std::min(
              base.high[i],
              base.values[i] + (base.high[i] - base.values[i]) * u);
          break;
        }
        case BaseLossSpec::Type::kTable:
          break;
      }
    }
  }
}

void Environment::BuildDelayed() {
  const int horizon = spec_.horizon;
  if (spec_.delays.size() == 1) {
    delays_.assign(horizon, spec_.delays[0]);
  } else if (static_cast<int>(spec_.delays.size()) == horizon) {
    delays_ = spec_.delays;
  } else {
    throw ConfigError("delays must have 1 or T entries");
  }
  lag_ = 0;
  for (int d : delays_) {
    if (d < 0) throw ConfigError("delays must be >= 0");
    lag_ = std::max(lag_, d);
  }
}

void Environment::BuildOptimistic() {
  const int k = spec_.num_actions;
  if (spec_.hint_delay < 0) throw ConfigError("hint delay must be >= 0");
  if (!spec_.hints.empty()) {
    CheckTable(spec_.hints, spec_.horizon, k, "hints");
    side_.clear();
    for (const auto& row : spec_.hints) {
      side_.insert(side_.end(), row.begin(), row.end());
    }
  } else {
    if (!(spec_.hint_noise >= 0.0)) throw ConfigError("hint noise must be >= 0");
    side_ = true_;
    const auto stream = static_cast<std::uint64_t>(Stream::kHints);
    for (std::size_t idx = 0; idx < side_.size(); ++idx) {
      const double u = CounterUniform(spec_.seed, stream, idx);
      side_[idx] = Clip01(side_[idx] + spec_.hint_noise * (2.0 * u - 1.0));
    }
  }
  lag_ = spec_.hint_delay;
}

void Environment::BuildCorrupted() {
  const int k = spec_.num_actions;
  const int horizon = spec_.horizon;
  lag_ = 0;
  if (!spec_.corrupted.empty()) {
    CheckTable(spec_.corrupted, horizon, k, "corrupted losses");
    side_.clear();
    for (const auto& row : spec_.corrupted) {
      side_.insert(side_.end(), row.begin(), row.end());
    }
    return;
  }
  const double budget = spec_.corruption_budget;
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw ConfigError("corruption budget must be finite and >= 0");
  }
  const double whole = std::floor(budget);
  const double fraction = budget - whole;
  const long long rounds =
      static_cast<long long>(whole) + (fraction > 0.0 ? 1 : 0);
  if (rounds > horizon) {
    throw ConfigError("corruption budget exceeds what T rounds can carry");
  }
  // Each corrupted round moves every coordinate toward 1 - l by alpha.
  side_ = true_;
  for (long long j = 0; j < rounds; ++j) {
    const long long t =
        spec_.placement == CorruptionPlacement::kFront
            ? j
            : (j * static_cast<long long>(horizon)) / rounds;
    const double alpha = j < static_cast<long long>(whole) ? 1.0 : fraction;
    for (int i = 0; i < k; ++i) {
      const std::size_t idx = static_cast<std::size_t>(t) * k + i;
      side_[idx] = Clip01(true_[idx] + alpha * (1.0 - 2.0 * true_[idx]));
    }
  }
}

void Environment::BuildComposite() {
  const int k = spec_.num_actions;
  const int horizon = spec_.horizon;
  const int d = spec_.partials.empty()
                    ? spec_.composite_d
                    : static_cast<int>(spec_.partials.front().size());
  if (d < 1) throw ConfigError("composite d must be >= 1");
  spec_.composite_d = d;
  prefix_.assign(static_cast<std::size_t>(horizon) * d * k, 0.0);
  auto prefix = [&](int t, int s) {
    return prefix_.begin() +
           (static_cast<std::size_t>(t - 1) * d + (s - 1)) * k;
  };
  if (!spec_.partials.empty()) {
    if (static_cast<int>(spec_.partials.size()) != horizon) {
      throw ConfigError("partials must have T rows");
    }
    for (int t = 1; t <= horizon; ++t) {
      const auto& row = spec_.partials[t - 1];
      if (static_cast<int>(row.size()) != d) {
        throw ConfigError("every round needs d partial losses");
      }
      for (int s = 1; s <= d; ++s) {
        if (static_cast<int>(row[s - 1].size()) != k) {
          throw ConfigError("partial loss must have K entries");
        }
        for (int i = 0; i < k; ++i) {
          const double previous = s == 1 ? 0.0 : prefix(t, s - 1)[i];
          prefix(t, s)[i] = previous + row[s - 1][i];
        }
      }
      std::copy(prefix(t, d), prefix(t, d) + k,
                true_.begin() + static_cast<std::size_t>(t - 1) * k);
    }
  } else {
    const auto stream = static_cast<std::uint64_t>(Stream::kComposite);
    std::vector<double> weights(d);
    for (int t = 1; t <= horizon; ++t) {
      for (int i = 0; i < k; ++i) {
        const double loss = true_[static_cast<std::size_t>(t - 1) * k + i];
        if (spec_.composite_mode == CompositeMode::kPositive) {
          double total = 0.0;
          for (int s = 0; s < d; ++s) {
            const std::uint64_t idx =
                (static_cast<std::uint64_t>(t - 1) * k + i) * d + s;
            weights[s] = CounterUniform(spec_.seed, stream, idx) + 1e-3;
            total += weights[s];
          }
          double running = 0.0;
          for (int s = 1; s < d; ++s) {
            running += weights[s - 1];
            prefix(t, s)[i] = std::min(loss, loss * (running / total));
          }
        } else {
          // Telescoping overshoot/undershoot around the final value.
          for (int s = 1; s < d; ++s) {
            const double swing = spec_.composite_amplitude *
                                 (1.0 - static_cast<double>(s) / d);
            prefix(t, s)[i] = Clip01(loss + (s % 2 == 0 ? swing : -swing));
          }
        }
        prefix(t, d)[i] = loss;
      }
    }
  }
  // Every prefix sum of partial losses must stay in [0,1]^K.
  for (int t = 1; t <= horizon; ++t) {
    for (int s = 1; s <= d; ++s) {
      if (!InUnitCube({&*prefix(t, s), static_cast<std::size_t>(k)})) {
        std::ostringstream os;
        os << "composite prefix sum leaves [0,1] at t = " << t
           << ", s = " << s;
        throw ConfigError(os.str());
      }
    }
  }
  lag_ = d - 1;
}

void Environment::BuildNoisy() {
  if (!(spec_.noise_eps0 >= 0.0) || !(spec_.noise_rho >= 0.0) ||
      spec_.noise_cutoff < 0) {
    throw ConfigError("noisy_decay needs eps0 >= 0, rho >= 0, cutoff >= 0");
  }
  side_.resize(true_.size());
  const auto stream = static_cast<std::uint64_t>(Stream::kNoise);
  for (std::size_t idx = 0; idx < side_.size(); ++idx) {
    side_[idx] = CounterBits(spec_.seed, stream, idx) >> 63 ? 1.0 : -1.0;
  }
  lag_ = spec_.noise_cutoff;
}

void Environment::BuildScripted() {
  const int k = spec_.num_actions;
  const int horizon = spec_.horizon;
  script_.assign(horizon, {});
  side_.clear();
  int row = 0;
  for (const auto& update : spec_.scripted_feedback) {
    if (update.origin_round < 1 || update.revision_round < update.origin_round ||
        update.revision_round > horizon) {
      std::ostringstream os;
      os << "scripted feedback (t = " << update.revision_round
         << ", tau = " << update.origin_round << ") out of range";
      throw ConfigError(os.str());
    }
    CheckLossVector(update.loss, k, "scripted feedback");
    side_.insert(side_.end(), update.loss.begin(), update.loss.end());
    script_[update.origin_round - 1].emplace_back(update.revision_round, row++);
  }
  lag_ = 0;
  for (int tau = 1; tau <= horizon; ++tau) {
    auto& revisions = script_[tau - 1];
    std::sort(revisions.begin(), revisions.end());
    for (std::size_t j = 1; j < revisions.size(); ++j) {
      if (revisions[j].first == revisions[j - 1].first) {
        throw ConfigError("duplicate scripted feedback entry");
      }
    }
    std::vector<double> current(k, 0.0);
    for (const auto& [t, r] : revisions) {
      const auto value = Row(side_, r + 1);
      if (!std::equal(value.begin(), value.end(), current.begin())) {
        if (t > tau) lag_ = std::max(lag_, t - tau);
        current.assign(value.begin(), value.end());
      }
    }
  }
}

std::span<const double> Environment::Row(const std::vector<double>& table,
                                         int t) const {
  return {table.data() + static_cast<std::size_t>(t - 1) * spec_.num_actions,
          static_cast<std::size_t>(spec_.num_actions)};
}

void Environment::CheckRounds(int t, int tau) const {
  if (tau < 1 || tau > t || t > spec_.horizon) {
    std::ostringstream os;
    os << "round indices (t = " << t << ", tau = " << tau
       << ") outside 1 <= tau <= t <= " << spec_.horizon;
    throw std::out_of_range(os.str());
  }
}

LossVector Environment::TrueLoss(int t) const {
  const auto view = TrueLossView(t);
  return {view.begin(), view.end()};
}

std::span<const double> Environment::TrueLossView(int t) const {
  if (t < 1 || t > spec_.horizon) {
    throw std::out_of_range("round " + std::to_string(t) + " out of range");
  }
  return Row(true_, t);
}

LossVector Environment::FeedbackLoss(int t, int tau) const {
  LossVector out(spec_.num_actions);
  FeedbackLossInto(t, tau, out);
  return out;
}

void Environment::FeedbackLossInto(int t, int tau,
                                   std::span<double> out) const {
  CheckRounds(t, tau);
  const int k = spec_.num_actions;
  const auto truth = Row(true_, tau);
  switch (spec_.kind) {
    case EnvironmentKind::kDelayed: {
      const long long revealed =
          static_cast<long long>(tau) + delays_[tau - 1];
      if (t >= revealed) {
        std::copy(truth.begin(), truth.end(), out.begin());
      } else {
        std::fill(out.begin(), out.begin() + k, 0.0);
      }
      return;
    }
    case EnvironmentKind::kOptimisticDelayed: {
      const auto src =
          t < static_cast<long long>(tau) + spec_.hint_delay ? Row(side_, tau)
                                                             : truth;
      std::copy(src.begin(), src.end(), out.begin());
      return;
    }
    case EnvironmentKind::kCorrupted: {
      const auto src = Row(side_, tau);
      std::copy(src.begin(), src.end(), out.begin());
      return;
    }
    case EnvironmentKind::kComposite: {
      const int d = spec_.composite_d;
      const int s = std::min(t + 1 - tau, d);
      const auto start =
          prefix_.begin() + (static_cast<std::size_t>(tau - 1) * d + (s - 1)) * k;
      std::copy(start, start + k, out.begin());
      return;
    }
    case EnvironmentKind::kNoisyDecay: {
      const int lag = t - tau;
      if (lag >= spec_.noise_cutoff) {
        std::copy(truth.begin(), truth.end(), out.begin());
        return;
      }
      const double scale = spec_.noise_eps0 * std::pow(spec_.noise_rho, lag);
      const auto direction = Row(side_, tau);
      for (int i = 0; i < k; ++i) {
        out[i] = Clip01(truth[i] + scale * direction[i]);
      }
      return;
    }
    case EnvironmentKind::kScripted: {
      const auto& revisions = script_[tau - 1];
      auto it = std::upper_bound(
          revisions.begin(), revisions.end(), t,
          [](int value, const std::pair<int, int>& r) { return value < r.first; });
      if (it == revisions.begin()) {
        std::fill(out.begin(), out.begin() + k, 0.0);
      } else {
        const auto src = Row(side_, std::prev(it)->second + 1);
        std::copy(src.begin(), src.end(), out.begin());
      }
      return;
    }
  }
}

int Environment::EvolutionHorizon() const {
  if (spec_.kind == EnvironmentKind::kCorrupted) return kUnboundedHorizon;
  return lag_;
}

int Environment::StabilizationLag() const { return lag_; }

std::shared_ptr<const Commitment> Environment::Materialize(
    std::uint64_t budget_doubles) const {
  const int k = spec_.num_actions;
  const int horizon = spec_.horizon;
  const std::uint64_t need = Commitment::FootprintDoubles(k, horizon, lag_);
  if (need > budget_doubles) {
    std::ostringstream os;
    os << "memory budget exceeded: commitment needs " << need
       << " doubles, budget is " << budget_doubles;
    throw ConfigError(os.str());
  }
  auto commitment = std::make_shared<Commitment>(k, horizon, lag_);
  for (int t = 1; t <= horizon; ++t) {
    const auto src = Row(true_, t);
    std::copy(src.begin(), src.end(), commitment->MutableTrueLoss(t).begin());
  }
  for (int tau = 1; tau <= horizon; ++tau) {
    const int lags = commitment->StoredLags(tau);
    for (int lag = 0; lag < lags; ++lag) {
      FeedbackLossInto(tau + lag, tau, commitment->MutableRevision(tau, lag));
    }
  }
  return commitment;
}

LossVector Environment::Partial(int t, int s) const {
  if (spec_.kind != EnvironmentKind::kComposite) {
    throw ConfigError("partial losses exist only for composite feedback");
  }
  const int d = spec_.composite_d;
  if (t < 1 || t > spec_.horizon || s < 1 || s > d) {
    throw std::out_of_range("partial index out of range");
  }
  const int k = spec_.num_actions;
  LossVector out(k);
  for (int i = 0; i < k; ++i) {
    const double current =
        prefix_[(static_cast<std::size_t>(t - 1) * d + (s - 1)) * k + i];
    const double previous =
        s == 1 ? 0.0
               : prefix_[(static_cast<std::size_t>(t - 1) * d + (s - 2)) * k + i];
    out[i] = current - previous;
  }
  return out;
}

}  // namespace evolve
