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

#ifndef EVOLVE_IO_H_
#define EVOLVE_IO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "evolve/core.h"
#include "evolve/environment.h"
#include "evolve/harness.h"
#include "evolve/metrics.h"

// JSON configs, CSV outputs, trace files and parameter sweeps.
//
// Conventions: rounds are 1-based; actions in CSV and trace files are
// 1-based as well.

namespace evolve {

using Json = nlohmann::json;

// Relative "file" entries resolve against `base_dir`.
EnvironmentSpec ParseEnvironmentSpec(const Json& json,
                                     const std::filesystem::path& base_dir = {});
LearnerConfig ParseLearnerConfig(const Json& json);
ExperimentConfig ParseExperimentConfig(const Json& json,
                                       const std::filesystem::path& base_dir = {});

// Throws ConfigError on unreadable or malformed JSON.
Json ReadJsonFile(const std::filesystem::path& path);

// Fields: D, Lambda, lambda_sum, d_max, corruption_budget.
Json AccuracyReportJson(const AccuracyReport& report);

std::string FormatNumber(double value);

inline constexpr const char* kSummaryHeader =
    "T,mean_regret,stderr,bound_cor1,bound_cor2_shape,D,Lambda,lambda_sum,C";
inline constexpr const char* kRoundHeader =
    "t,seed,action,true_loss,cum_regret,lambda_t,D_partial";

// One summary row (no header).
std::string SummaryRow(const ExperimentResult& result);
// Summary CSV: header plus one row.
std::string SummaryCsv(const ExperimentResult& result);
// Per-seed, per-round rows; needs result.traces.
std::string RoundCsv(const ExperimentResult& result);
// Per-round regret curve with the bound overlay.
std::string CurveCsv(const ExperimentResult& result);

// Sets a dotted path ("environment.delay") inside a JSON object.
void SetJsonPath(Json* json, const std::string& path, const Json& value);
// "a,b,c" -> JSON values; numbers and booleans parse as such.
std::vector<Json> ParseSweepValues(const std::string& list);

// One row per value, in the given order; a failing point records its error
// in the status column and the sweep continues.
std::string Sweep(const Json& base_config, const std::string& param,
                  const std::vector<Json>& values,
                  const std::filesystem::path& base_dir = {});

// Trace files use the scripted-environment schema
//   { "K", "T", "true": [[..]..], "feedback": [{"t","tau","loss"}..] }
// plus optional "d_max", "actions" (1-based) and "probs".
Json TraceToJson(const RunTrace& trace, int d_max);
struct LoadedTrace {
  RunTrace trace;
  int d_max = kUnboundedHorizon;
};
LoadedTrace TraceFromJson(const Json& json);

}  // namespace evolve

#endif  // EVOLVE_IO_H_
