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

#include "evolve/io.h"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace evolve {
namespace {

std::vector<LossVector> ReadTable(const Json& json) {
  std::vector<LossVector> rows;
  for (const auto& row : json) rows.push_back(row.get<LossVector>());
  return rows;
}

BaseLossSpec ParseBase(const Json& json) {
  BaseLossSpec base;
  const std::string type = json.value("type", std::string("constant"));
  if (type == "constant") {
    base.type = BaseLossSpec::Type::kConstant;
    base.values = json.at("values").get<std::vector<double>>();
  } else if (type == "bernoulli") {
    base.type = BaseLossSpec::Type::kBernoulli;
    base.values = json.at("means").get<std::vector<double>>();
  } else if (type == "uniform") {
    base.type = BaseLossSpec::Type::kUniform;
    base.values = json.at("low").get<std::vector<double>>();
    base.high = json.at("high").get<std::vector<double>>();
  } else if (type == "table") {
    base.type = BaseLossSpec::Type::kTable;
    base.table = ReadTable(json.at("rows"));
  } else {
    throw ConfigError("unknown base loss type: " + type);
  }
  return base;
}

std::optional<double> ParseTuneValue(const Json& json) {
  if (json.is_string()) {
    if (json.get<std::string>() != "measured") {
      throw ConfigError("auto_tune bound must be a number or \"measured\"");
    }
    return std::nullopt;
  }
  return json.get<double>();
}

std::string CsvField(std::string text) {
  for (char& ch : text) {
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ' ';
  }
  return text;
}

template <typename Fn>
auto Guard(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed JSON config: ") + e.what());
  }
}

}  // namespace

Json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
}

EnvironmentSpec ParseEnvironmentSpec(const Json& json_in,
                                     const std::filesystem::path& base_dir) {
  return Guard([&] {
    Json json = json_in;
    if (json.contains("file")) {
      std::filesystem::path file = json.at("file").get<std::string>();
      if (file.is_relative() && !base_dir.empty()) file = base_dir / file;
      Json loaded = ReadJsonFile(file);
      for (auto& [key, value] : json.items()) {
        if (key != "file") loaded[key] = value;
      }
      json = std::move(loaded);
    }
    EnvironmentSpec spec;
    const std::string kind = json.contains("kind")
                                 ? json.at("kind").get<std::string>()
                                 : std::string("scripted");
    spec.kind = KindFromName(kind);
    spec.num_actions = json.at("K").get<int>();
    spec.horizon = json.at("T").get<int>();
    spec.seed = json.value("seed", std::uint64_t{0});
    if (json.contains("true")) {
      spec.base.type = BaseLossSpec::Type::kTable;
      spec.base.table = ReadTable(json.at("true"));
    } else if (json.contains("base")) {
      spec.base = ParseBase(json.at("base"));
    } else if (!(spec.kind == EnvironmentKind::kComposite &&
                 json.contains("partials"))) {
      throw ConfigError("environment needs \"base\" or \"true\" losses");
    }
    switch (spec.kind) {
      case EnvironmentKind::kScripted:
        if (spec.base.type != BaseLossSpec::Type::kTable) {
          throw ConfigError("scripted environments need a \"true\" table");
        }
        for (const auto& entry : json.value("feedback", Json::array())) {
          spec.scripted_feedback.push_back(
              {entry.at("tau").get<int>(), entry.at("t").get<int>(),
               entry.at("loss").get<LossVector>()});
        }
        break;
      case EnvironmentKind::kDelayed:
        if (json.contains("delays")) {
          spec.delays = json.at("delays").get<std::vector<int>>();
        } else {
          spec.delays = {json.value("delay", 0)};
        }
        break;
      case EnvironmentKind::kOptimisticDelayed:
        spec.hint_delay = json.value("hint_delay", json.value("d", 0));
        spec.hint_noise = json.value("hint_noise", 0.0);
        if (json.contains("hints")) spec.hints = ReadTable(json.at("hints"));
        break;
      case EnvironmentKind::kCorrupted: {
        if (json.contains("corrupted")) {
          spec.corrupted = ReadTable(json.at("corrupted"));
        }
        spec.corruption_budget = json.value("budget", 0.0);
        const std::string placement = json.value("placement", std::string("front"));
        if (placement == "front") {
          spec.placement = CorruptionPlacement::kFront;
        } else if (placement == "spread") {
          spec.placement = CorruptionPlacement::kSpread;
        } else {
          throw ConfigError("placement must be front or spread");
        }
        break;
      }
      case EnvironmentKind::kComposite: {
        spec.composite_d = json.value("d", 1);
        const std::string mode = json.value("mode", std::string("positive"));
        if (mode == "positive") {
          spec.composite_mode = CompositeMode::kPositive;
        } else if (mode == "negative") {
          spec.composite_mode = CompositeMode::kNegative;
        } else {
          throw ConfigError("composite mode must be positive or negative");
        }
        spec.composite_amplitude = json.value("amplitude", 0.5);
        if (json.contains("partials")) {
          for (const auto& round : json.at("partials")) {
            spec.partials.push_back(ReadTable(round));
          }
        }
        break;
      }
      case EnvironmentKind::kNoisyDecay:
        spec.noise_eps0 = json.value("eps0", 0.0);
        spec.noise_rho = json.value("rho", 0.5);
        spec.noise_cutoff = json.value("cutoff", 0);
        break;
    }
    return spec;
  });
}

LearnerConfig ParseLearnerConfig(const Json& json) {
  return Guard([&] {
    LearnerConfig config;
    const std::string algo = json.at("algo").get<std::string>();
    if (algo == "ewa") {
      config.algo = LearnerConfig::Algo::kEwa;
    } else if (algo == "ftrl") {
      config.algo = LearnerConfig::Algo::kFtrl;
    } else if (algo == "skip") {
      config.algo = LearnerConfig::Algo::kSkip;
    } else {
      throw ConfigError("unknown learner algo: " + algo);
    }
    auto optional_double = [&](const char* key) -> std::optional<double> {
      if (!json.contains(key) || json.at(key).is_null()) return std::nullopt;
      return json.at(key).get<double>();
    };
    config.eta = optional_double("eta");
    config.gamma = optional_double("gamma");
    config.barrier = optional_double("barrier");
    if (json.contains("d_max") && !json.at("d_max").is_null()) {
      config.d_max = json.at("d_max").get<int>();
    }
    if (json.contains("inner") && !json.at("inner").is_null()) {
      config.inner =
          std::make_shared<LearnerConfig>(ParseLearnerConfig(json.at("inner")));
    }
    if (json.contains("auto_tune") && !json.at("auto_tune").is_null()) {
      const Json& tune = json.at("auto_tune");
      if (tune.contains("D_bar")) {
        config.tune = LearnerConfig::Tune::kDBar;
        config.tune_bound = ParseTuneValue(tune.at("D_bar"));
      } else if (tune.contains("Lambda_bar")) {
        config.tune = LearnerConfig::Tune::kLambdaBar;
        config.tune_bound = ParseTuneValue(tune.at("Lambda_bar"));
      } else {
        throw ConfigError("auto_tune needs D_bar or Lambda_bar");
      }
    }
    return config;
  });
}

ExperimentConfig ParseExperimentConfig(const Json& json,
                                       const std::filesystem::path& base_dir) {
  return Guard([&] {
    ExperimentConfig config;
    config.environment = ParseEnvironmentSpec(json.at("environment"), base_dir);
    config.learner = ParseLearnerConfig(json.at("learner"));
    if (json.contains("seeds")) {
      config.seeds = json.at("seeds").get<std::vector<RngSeed>>();
    } else {
      const int count = json.value("num_seeds", 1);
      const RngSeed first = json.value("seed_base", RngSeed{1});
      if (count < 1) throw ConfigError("num_seeds must be >= 1");
      for (int i = 0; i < count; ++i) config.seeds.push_back(first + i);
    }
    if (config.seeds.empty()) throw ConfigError("seeds must be nonempty");
    if (json.contains("T") &&
        json.at("T").get<int>() != config.environment.horizon) {
      throw ConfigError("T differs from the environment horizon");
    }
    const std::string bound = json.value("bound", std::string("none"));
    if (bound == "cor1") {
      config.bound = BoundKind::kCor1;
    } else if (bound == "cor2") {
      config.bound = BoundKind::kCor2;
    } else if (bound == "none") {
      config.bound = BoundKind::kNone;
    } else {
      throw ConfigError("bound must be cor1, cor2 or none");
    }
    config.bound_constant = json.value("bound_constant", 1.0);
    if (json.contains("memory_budget_mb")) {
      config.memory_budget =
          json.at("memory_budget_mb").get<std::uint64_t>() * (1u << 20) / 8;
    }
    config.strict_gamma = json.value("strict_gamma", false);
    config.validate = json.value("validate", true);
    return config;
  });
}

Json AccuracyReportJson(const AccuracyReport& report) {
  return Json{{"D", report.D},
              {"Lambda", report.Lambda},
              {"lambda_sum", report.lambda_sum},
              {"d_max", report.d_max_observed},
              {"corruption_budget", report.corruption_budget}};
}

std::string FormatNumber(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

std::string SummaryRow(const ExperimentResult& result) {
  const AccuracyReport& a = result.accuracy;
  std::ostringstream os;
  os << result.commitment->horizon() << ','
     << FormatNumber(result.regret.mean_final) << ','
     << FormatNumber(result.regret.stderr_final) << ','
     << FormatNumber(result.bound_cor1) << ','
     << FormatNumber(result.bound_cor2_shape) << ',' << FormatNumber(a.D)
     << ',' << FormatNumber(a.Lambda) << ',' << FormatNumber(a.lambda_sum)
     << ',' << FormatNumber(a.corruption_budget);
  return os.str();
}

std::string SummaryCsv(const ExperimentResult& result) {
  return std::string(kSummaryHeader) + "\n" + SummaryRow(result) + "\n";
}

std::string RoundCsv(const ExperimentResult& result) {
  std::ostringstream os;
  os << kRoundHeader << '\n';
  const AccuracyReport& a = result.accuracy;
  for (const RunTrace& trace : result.traces) {
    const auto cumulative = CumulativeRegret(trace, result.regret.comparator);
    for (int t = 1; t <= trace.completed_rounds(); ++t) {
      const int action = trace.actions[t - 1];
      os << t << ',' << trace.seed << ',' << action + 1 << ','
         << FormatNumber(trace.commitment->TrueLoss(t)[action]) << ','
         << FormatNumber(cumulative[t - 1]) << ','
         << FormatNumber(a.lambda_t[t - 1]) << ','
         << FormatNumber(a.D_partial[t - 1]) << '\n';
    }
  }
  return os.str();
}

std::string CurveCsv(const ExperimentResult& result) {
  std::ostringstream os;
  os << "t,mean_regret,stderr" << (result.bound.empty() ? "" : ",bound")
     << '\n';
  const auto& curve = result.regret;
  for (std::size_t t = 0; t < curve.mean.size(); ++t) {
    os << t + 1 << ',' << FormatNumber(curve.mean[t]) << ','
       << FormatNumber(curve.standard_error[t]);
    if (!result.bound.empty()) os << ',' << FormatNumber(result.bound[t]);
    os << '\n';
  }
  return os.str();
}

void SetJsonPath(Json* json, const std::string& path, const Json& value) {
  Json* node = json;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw ConfigError("bad parameter path: " + path);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

std::vector<Json> ParseSweepValues(const std::string& list) {
  std::vector<Json> values;
  std::stringstream stream(list);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) continue;
    try {
      values.push_back(Json::parse(item));
    } catch (const Json::exception&) {
      values.emplace_back(item);
    }
  }
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  return values;
}

std::string Sweep(const Json& base_config, const std::string& param,
                  const std::vector<Json>& values,
                  const std::filesystem::path& base_dir) {
  std::ostringstream os;
  os << "param,value," << kSummaryHeader << ",status\n";
  for (const Json& value : values) {
    const std::string shown =
        value.is_string() ? value.get<std::string>() : value.dump();
    os << CsvField(param) << ',' << CsvField(shown) << ',';
    try {
      Json config = base_config;
      SetJsonPath(&config, param, value);
      const ExperimentResult result =
          RunExperiment(ParseExperimentConfig(config, base_dir));
      os << SummaryRow(result) << ','
         << (result.failures == 0 ? std::string("ok")
                                  : CsvField("failed: " + result.first_failure))
         << '\n';
    } catch (const std::exception& e) {
      os << ",,,,,,,,," << CsvField(std::string("error: ") + e.what()) << '\n';
    }
  }
  return os.str();
}

Json TraceToJson(const RunTrace& trace, int d_max) {
  const Commitment& c = *trace.commitment;
  Json json;
  json["K"] = c.num_actions();
  json["T"] = c.horizon();
  if (d_max != kUnboundedHorizon) json["d_max"] = d_max;
  Json truth = Json::array();
  for (int t = 1; t <= c.horizon(); ++t) {
    const auto row = c.TrueLoss(t);
    truth.push_back(LossVector(row.begin(), row.end()));
  }
  json["true"] = std::move(truth);
  Json feedback = Json::array();
  for (int tau = 1; tau <= c.horizon(); ++tau) {
    for (int lag = 0; lag < c.StoredLags(tau); ++lag) {
      const auto row = c.Revision(tau, lag);
      feedback.push_back({{"t", tau + lag},
                          {"tau", tau},
                          {"loss", LossVector(row.begin(), row.end())}});
    }
  }
  json["feedback"] = std::move(feedback);
  Json actions = Json::array();
  Json probs = Json::array();
  for (int t = 1; t <= trace.completed_rounds(); ++t) {
    actions.push_back(trace.actions[t - 1] + 1);
    const auto p = trace.SamplingProbs(t);
    probs.push_back(std::vector<double>(p.begin(), p.end()));
  }
  json["actions"] = std::move(actions);
  json["probs"] = std::move(probs);
  json["seed"] = trace.seed;
  return json;
}

LoadedTrace TraceFromJson(const Json& json) {
  return Guard([&] {
    Json scripted = json;
    scripted["kind"] = "scripted";
    const EnvironmentSpec spec = ParseEnvironmentSpec(scripted);
    LoadedTrace loaded;
    const int horizon = spec.horizon;
    // Keep every listed revision so that late changes stay visible.
    int window = 0;
    for (const auto& update : spec.scripted_feedback) {
      window = std::max(window, update.revision_round - update.origin_round);
    }
    const Environment env(spec);
    auto commitment =
        std::make_shared<Commitment>(spec.num_actions, horizon, window);
    for (int t = 1; t <= horizon; ++t) {
      const auto row = env.TrueLossView(t);
      std::copy(row.begin(), row.end(), commitment->MutableTrueLoss(t).begin());
    }
    for (int tau = 1; tau <= horizon; ++tau) {
      for (int lag = 0; lag < commitment->StoredLags(tau); ++lag) {
        env.FeedbackLossInto(tau + lag, tau,
                             commitment->MutableRevision(tau, lag));
      }
    }
    loaded.trace.commitment = commitment;
    loaded.trace.seed = json.value("seed", RngSeed{0});
    if (json.contains("d_max")) loaded.d_max = json.at("d_max").get<int>();
    for (const auto& a : json.value("actions", Json::array())) {
      loaded.trace.actions.push_back(a.get<int>() - 1);
    }
    for (const auto& row : json.value("probs", Json::array())) {
      for (const auto& p : row) loaded.trace.sampling_probs.push_back(p.get<double>());
    }
    return loaded;
  });
}

}  // namespace evolve
