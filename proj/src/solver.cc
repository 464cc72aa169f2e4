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

#include "evolve/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace evolve {
namespace {

// Solves L + (x + 1) / eta - barrier * exp(-x) = level for x = ln p.
// The left side is increasing and concave in x, so Newton from the left of
// the root climbs monotonically; the bracket guards starts from the right.
double SolveCoordinate(double loss, double level, const RegularizerParams& rp,
                       double start) {
  const double inv_eta = 1.0 / rp.eta;
  const double entropy_root = rp.eta * (level - loss) - 1.0;
  if (rp.barrier == 0.0) return entropy_root;

  double hi = std::max(entropy_root, 0.0) + rp.eta * rp.barrier;
  double lo = std::max(entropy_root,
                       std::log(rp.eta * rp.barrier / (hi - entropy_root)));
  if (!(lo < hi)) return lo;

  auto f = [&](double x) {
    return loss + (x + 1.0) * inv_eta - rp.barrier * std::exp(-x) - level;
  };
  double x = (start > lo && start < hi) ? start : lo;
  for (int it = 0; it < kMaxInnerIterations; ++it) {
    const double value = f(x);
    const double scale = std::abs(loss) + std::abs(level) +
                         std::abs(x + 1.0) * inv_eta +
                         rp.barrier * std::exp(-x);
    // Below this the sign of f is rounding noise.
    if (std::abs(value) <= 8e-16 * scale) return x;
    if (value < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double slope = inv_eta + rp.barrier * std::exp(-x);
    double next = x - value / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step <= 4e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

double SumExp(const std::vector<double>& log_probs) {
  double s = 0.0;
  for (double x : log_probs) s += std::exp(x);
  return s;
}

}  // namespace

void RegularizerParams::Validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ConfigError("eta must be finite and > 0");
  }
  if (!(barrier >= 0.0) || !std::isfinite(barrier)) {
    throw ConfigError("barrier must be finite and >= 0");
  }
}

std::vector<double> Softmax(std::span<const double> cumulative_loss,
                            double eta) {
  const double lowest =
      *std::min_element(cumulative_loss.begin(), cumulative_loss.end());
  std::vector<double> p(cumulative_loss.size());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(-eta * (cumulative_loss[i] - lowest));
    total += p[i];
  }
  // Underflowed weights stay at the smallest normal so p remains interior.
  for (double& v : p) v = std::max(v / total, std::numeric_limits<double>::min());
  return p;
}

double KktResidual(std::span<const double> probs,
                   std::span<const double> cumulative_loss,
                   const RegularizerParams& params) {
  const std::size_t k = probs.size();
  std::vector<double> g(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(probs[i] > 0.0)) {
      throw NumericError("KKT residual needs a strictly interior point");
    }
    g[i] = cumulative_loss[i] + (std::log(probs[i]) + 1.0) / params.eta -
           params.barrier / probs[i];
  }
  const double mean = std::accumulate(g.begin(), g.end(), 0.0) / k;
  double worst = 0.0;
  for (double gi : g) worst = std::max(worst, std::abs(gi - mean));
  return worst / (1.0 + std::abs(mean));
}

double Objective(std::span<const double> probs,
                 std::span<const double> cumulative_loss,
                 const RegularizerParams& params) {
  double value = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    value += probs[i] * cumulative_loss[i] +
             (probs[i] / params.eta - params.barrier) * std::log(probs[i]);
  }
  return value;
}

double BarrierFloor(std::span<const double> cumulative_loss,
                    const RegularizerParams& params) {
  const auto [lo, hi] =
      std::minmax_element(cumulative_loss.begin(), cumulative_loss.end());
  const double k = static_cast<double>(cumulative_loss.size());
  return params.barrier /
         (params.barrier * k + (*hi - *lo) +
          std::max(2.0, std::log(k)) / params.eta + 1.0);
}

SolveResult Solve(std::span<const double> cumulative_loss,
                  const RegularizerParams& params,
                  SolverWarmStart* warm_start) {
  params.Validate();
  const std::size_t k = cumulative_loss.size();
  if (k == 0) throw ConfigError("solver needs at least one action");
  for (double v : cumulative_loss) {
    if (!std::isfinite(v)) throw ConfigError("cumulative loss must be finite");
  }
  SolveResult result;
  if (k == 1) {
    result.probs = {1.0};
    result.converged = true;
    return result;
  }
  if (params.barrier == 0.0) {
    result.probs = Softmax(cumulative_loss, params.eta);
    result.residual = KktResidual(result.probs, cumulative_loss, params);
    result.converged = true;
    return result;
  }

  // The objective only sees differences of L.
  const double shift =
      *std::min_element(cumulative_loss.begin(), cumulative_loss.end());
  std::vector<double> loss(k);
  for (std::size_t i = 0; i < k; ++i) loss[i] = cumulative_loss[i] - shift;

  // At level v every coordinate solves g_i(p_i) = v; sum_i p_i(v) increases
  // with v. Evaluating g_i at the uniform point brackets the root.
  const double log_uniform = -std::log(static_cast<double>(k));
  double level_lo = std::numeric_limits<double>::infinity();
  double level_hi = -level_lo;
  for (double l : loss) {
    const double g = l + (log_uniform + 1.0) / params.eta -
                     params.barrier * static_cast<double>(k);
    level_lo = std::min(level_lo, g);
    level_hi = std::max(level_hi, g);
  }

  std::vector<double> x(k, log_uniform);
  std::vector<double> best_x = x;
  double best_error = std::numeric_limits<double>::infinity();
  if (level_lo == level_hi) {
    best_error = std::abs(SumExp(x) - 1.0);
  } else {
    double level;
    if (warm_start != nullptr && warm_start->valid &&
        warm_start->level - shift > level_lo &&
        warm_start->level - shift < level_hi) {
      level = warm_start->level - shift;
    } else {
      level = 0.5 * (level_lo + level_hi);
    }
    for (int it = 0; it < kMaxOuterIterations; ++it) {
      result.outer_iterations = it + 1;
      for (std::size_t i = 0; i < k; ++i) {
        x[i] = SolveCoordinate(loss[i], level, params, x[i]);
      }
      const double sum = SumExp(x);
      const double error = std::abs(sum - 1.0);
      if (error < best_error) {
        best_error = error;
        best_x = x;
        if (warm_start != nullptr) warm_start->level = level + shift;
      }
      if (error <= 1e-14) break;
      if (sum < 1.0) {
        level_lo = level;
      } else {
        level_hi = level;
      }
      // Newton on ln(sum p(v)).
      double slope = 0.0;
      for (double xi : x) {
        const double p = std::exp(xi);
        slope += p / (1.0 / params.eta + params.barrier / p);
      }
      double next = level - std::log(sum) * sum / slope;
      if (!(next > level_lo && next < level_hi)) {
        next = 0.5 * (level_lo + level_hi);
      }
      if (next == level) break;
      level = next;
    }
  }

  double sum = SumExp(best_x);
  result.sum_error = std::abs(sum - 1.0);
  result.probs.resize(k);
  for (std::size_t i = 0; i < k; ++i) result.probs[i] = std::exp(best_x[i]) / sum;
  result.residual = KktResidual(result.probs, cumulative_loss, params);
  result.converged =
      result.sum_error <= kSumTarget && result.residual <= kResidualTarget;
  if (warm_start != nullptr) warm_start->valid = result.converged;
  return result;
}

ActionDistribution SolveArgmin(std::span<const double> cumulative_loss,
                               const RegularizerParams& params,
                               SolverWarmStart* warm_start) {
  SolveResult result = Solve(cumulative_loss, params, warm_start);
  if (!result.converged) {
    std::ostringstream os;
    os.precision(6);
    os << "simplex solver did not converge after " << result.outer_iterations
       << " iterations (sum error " << result.sum_error << ", KKT residual "
       << result.residual << ")";
    throw NumericError(os.str());
  }
  return ActionDistribution(std::move(result.probs));
}

}  // namespace evolve
