//
// Copyright 2026 The dprag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dprag/trace_io.h"

#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "dprag/random.h"

namespace dprag {
namespace {

nlohmann::json BudgetToJson(const PrivacyBudget& budget) {
  return {{"epsilon", budget.epsilon}, {"delta", budget.delta}};
}

nlohmann::json TokenToJson(TokenId id, const Vocabulary& vocabulary) {
  return {{"id", id}, {"surface", vocabulary.Surface(id)}};
}

}  // namespace

nlohmann::json RunConfigToJson(const RunConfig& config) {
  nlohmann::json json = {
      {"algorithm", std::string(AlgorithmName(config.algorithm))},
      {"m", config.m},
      {"k", config.k},
      {"per_token", BudgetToJson(config.per_token)},
      {"total", BudgetToJson(config.total)},
      {"tau", config.Tau()},
      {"t_max_cap", config.t_max_cap},
      {"seed", config.seed},
  };
  json["vocabulary_size"] = config.vocabulary_size.has_value()
                                ? nlohmann::json(*config.vocabulary_size)
                                : nlohmann::json();
  return json;
}

nlohmann::json TraceToJson(const GenerationTrace& trace,
                           const Vocabulary& vocabulary) {
  nlohmann::json json;
  json["question"] = trace.question;
  json["algorithm"] = std::string(AlgorithmName(trace.algorithm));
  json["config"] = RunConfigToJson(trace.config);
  json["retrieved"] = trace.retrieved;
  json["partition"] = trace.partition.subsets;
  if (trace.plan.has_value()) {
    json["plan"] = {
        {"per_token", BudgetToJson(trace.plan->per_token)},
        {"total", BudgetToJson(trace.plan->total)},
        {"max_steps", trace.plan->max_steps},
        {"rule", std::string(CompositionRuleName(trace.plan->rule_used))}};
  } else {
    json["plan"] = nullptr;
  }
  nlohmann::json steps = nlohmann::json::array();
  for (const StepRecord& step : trace.steps) {
    nlohmann::json record;
    record["index"] = step.index;
    record["voter_tokens"] = step.voter_tokens;
    record["non_rag_token"] = step.non_rag_token.has_value()
                                  ? TokenToJson(*step.non_rag_token, vocabulary)
                                  : nlohmann::json();
    nlohmann::json histogram = nlohmann::json::array();
    for (const auto& [token, count] : step.histogram.counts()) {
      histogram.push_back({token, count});
    }
    record["histogram"] = std::move(histogram);
    record["verdict"] = std::string(StepVerdictName(step.verdict));
    record["emitted_token"] = step.emitted_token.has_value()
                                  ? TokenToJson(*step.emitted_token, vocabulary)
                                  : nlohmann::json();
    record["budget_remaining_after"] =
        step.budget_remaining_after.has_value()
            ? nlohmann::json(*step.budget_remaining_after)
            : nlohmann::json();
    steps.push_back(std::move(record));
  }
  json["steps"] = std::move(steps);
  json["answer"] = trace.AnswerText();
  json["halt_reason"] = std::string(HaltReasonName(trace.halt_reason));
  json["private_votes"] = trace.PrivateVotes();
  json["vocabulary_extensions"] = trace.vocabulary_extensions;
  return json;
}

std::string ConfigHash(const RunConfig& config) {
  nlohmann::json json = RunConfigToJson(config);
  json.erase("seed");
  return absl::StrFormat("%016x", Fnv1a64(json.dump()));
}

std::string TraceFileName(const RunConfig& config) {
  return absl::StrFormat("trace-%s-%d.json", ConfigHash(config), config.seed);
}

absl::StatusOr<std::filesystem::path> WriteTrace(
    const GenerationTrace& trace, const Vocabulary& vocabulary,
    const std::filesystem::path& directory) {
  std::error_code error;
  std::filesystem::create_directories(directory, error);
  if (error) {
    return absl::InternalError(absl::StrFormat(
        "Cannot create %s: %s", directory.string(), error.message()));
  }
  const std::filesystem::path path = directory / TraceFileName(trace.config);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::InternalError(
        absl::StrFormat("Cannot write %s", path.string()));
  }
  out << TraceToJson(trace, vocabulary).dump(2) << '\n';
  if (!out) {
    return absl::InternalError(
        absl::StrFormat("Failed writing %s", path.string()));
  }
  return path;
}

}  // namespace dprag
