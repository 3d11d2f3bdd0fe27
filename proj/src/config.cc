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

#include "dprag/config.h"

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "dprag/data_io.h"
#include "dprag/ngram_generator.h"
#include "dprag/remote_generator.h"
#include "dprag/scripted_generator.h"
#include "dprag/status_macros.h"
#include "dprag/string_compat.h"
#include "toml.hpp"

namespace dprag {
namespace {

namespace fs = std::filesystem;

// Typed access to one TOML table; `where` names it in error messages.
class TableReader {
 public:
  TableReader(const toml::table& table, std::string where)
      : table_(table), where_(std::move(where)) {}

  absl::Status CheckKeys(
      std::initializer_list<std::string_view> allowed) const {
    for (const auto& [key, node] : table_) {
      bool known = false;
      for (std::string_view name : allowed) known |= key.str() == name;
      if (!known) {
        return absl::InvalidArgumentError(
            absl::StrCat("Unknown config key '", Qualified(key.str()), "'"));
      }
    }
    return absl::OkStatus();
  }

  absl::Status Read(std::string_view key, double* out) const {
    const toml::node* node = table_.get(key);
    if (node == nullptr) return absl::OkStatus();
    if (auto value = node->value<double>(); value && node->is_number()) {
      *out = *value;
      return absl::OkStatus();
    }
    return TypeError(key, "a number");
  }

  absl::Status Read(std::string_view key, std::optional<double>* out) const {
    if (table_.get(key) == nullptr) return absl::OkStatus();
    double value = 0.0;
    RETURN_IF_ERROR(Read(key, &value));
    *out = value;
    return absl::OkStatus();
  }

  absl::Status Read(std::string_view key, int64_t* out) const {
    const toml::node* node = table_.get(key);
    if (node == nullptr) return absl::OkStatus();
    if (!node->is_integer()) return TypeError(key, "an integer");
    *out = *node->value<int64_t>();
    return absl::OkStatus();
  }

  absl::Status Read(std::string_view key, int* out) const {
    int64_t value = *out;
    RETURN_IF_ERROR(Read(key, &value));
    *out = static_cast<int>(value);
    return absl::OkStatus();
  }

  absl::Status Read(std::string_view key, std::string* out) const {
    const toml::node* node = table_.get(key);
    if (node == nullptr) return absl::OkStatus();
    if (!node->is_string()) return TypeError(key, "a string");
    *out = *node->value<std::string>();
    return absl::OkStatus();
  }

  absl::Status ReadPath(std::string_view key, const fs::path& base,
                        std::optional<fs::path>* out) const {
    std::string text;
    if (table_.get(key) == nullptr) return absl::OkStatus();
    RETURN_IF_ERROR(Read(key, &text));
    fs::path path(text);
    *out = path.is_relative() ? (base / path).lexically_normal() : path;
    return absl::OkStatus();
  }

  absl::Status Read(std::string_view key, std::vector<double>* out) const {
    const toml::node* node = table_.get(key);
    if (node == nullptr) return absl::OkStatus();
    const toml::array* array = node->as_array();
    if (array == nullptr) return TypeError(key, "an array of numbers");
    out->clear();
    for (const toml::node& element : *array) {
      if (!element.is_number()) return TypeError(key, "an array of numbers");
      out->push_back(*element.value<double>());
    }
    return absl::OkStatus();
  }

  absl::Status Read(std::string_view key, std::vector<int>* out) const {
    const toml::node* node = table_.get(key);
    if (node == nullptr) return absl::OkStatus();
    const toml::array* array = node->as_array();
    if (array == nullptr) return TypeError(key, "an array of integers");
    out->clear();
    for (const toml::node& element : *array) {
      if (!element.is_integer()) return TypeError(key, "an array of integers");
      out->push_back(static_cast<int>(*element.value<int64_t>()));
    }
    return absl::OkStatus();
  }

  absl::Status Read(std::string_view key, std::vector<std::string>* out) const {
    const toml::node* node = table_.get(key);
    if (node == nullptr) return absl::OkStatus();
    const toml::array* array = node->as_array();
    if (array == nullptr) return TypeError(key, "an array of strings");
    out->clear();
    for (const toml::node& element : *array) {
      if (!element.is_string()) return TypeError(key, "an array of strings");
      out->push_back(*element.value<std::string>());
    }
    return absl::OkStatus();
  }

  // Null when the sub-table is absent.
  absl::StatusOr<const toml::table*> Table(std::string_view key) const {
    const toml::node* node = table_.get(key);
    if (node == nullptr) return nullptr;
    if (!node->is_table()) return TypeError(key, "a table");
    return node->as_table();
  }

 private:
  std::string Qualified(std::string_view key) const {
    return where_.empty() ? std::string(key)
                          : absl::StrCat(where_, ".", ToAbsl(key));
  }

  absl::Status TypeError(std::string_view key, std::string_view type) const {
    return absl::InvalidArgumentError(absl::StrCat(
        "Config key '", Qualified(key), "' must be ", ToAbsl(type)));
  }

  const toml::table& table_;
  std::string where_;
};

absl::StatusOr<Algorithm> AlgorithmFromName(std::string_view name) {
  std::optional<Algorithm> algorithm = ParseAlgorithm(name);
  if (!algorithm.has_value()) {
    return absl::InvalidArgumentError(
        absl::StrCat("Unknown algorithm '", ToAbsl(name), "'"));
  }
  return *algorithm;
}

absl::Status ParseGenerator(const toml::table& table, const fs::path& base,
                            GeneratorSettings* settings) {
  TableReader reader(table, "generator");
  RETURN_IF_ERROR(reader.CheckKeys({"kind", "scripted", "ngram", "remote"}));
  std::string kind;
  RETURN_IF_ERROR(reader.Read("kind", &kind));
  if (!kind.empty()) {
    ASSIGN_OR_RETURN(settings->kind, ParseGeneratorKind(kind));
  }

  ASSIGN_OR_RETURN(const toml::table* scripted, reader.Table("scripted"));
  if (scripted != nullptr) {
    TableReader sub(*scripted, "generator.scripted");
    RETURN_IF_ERROR(sub.CheckKeys({"table"}));
    RETURN_IF_ERROR(sub.ReadPath("table", base, &settings->scripted_table));
  }

  ASSIGN_OR_RETURN(const toml::table* ngram, reader.Table("ngram"));
  if (ngram != nullptr) {
    TableReader sub(*ngram, "generator.ngram");
    RETURN_IF_ERROR(sub.CheckKeys(
        {"training", "order", "alpha", "context_weight", "context_window"}));
    RETURN_IF_ERROR(sub.ReadPath("training", base, &settings->ngram_training));
    RETURN_IF_ERROR(sub.Read("order", &settings->ngram.order));
    RETURN_IF_ERROR(sub.Read("alpha", &settings->ngram.alpha));
    RETURN_IF_ERROR(
        sub.Read("context_weight", &settings->ngram.context_weight));
    int64_t window = static_cast<int64_t>(settings->ngram.context_window);
    RETURN_IF_ERROR(sub.Read("context_window", &window));
    if (window < 0) {
      return absl::InvalidArgumentError("context_window must be >= 0");
    }
    settings->ngram.context_window = static_cast<size_t>(window);
  }

  ASSIGN_OR_RETURN(const toml::table* remote, reader.Table("remote"));
  if (remote != nullptr) {
    TableReader sub(*remote, "generator.remote");
    RemoteGeneratorOptions& options = settings->remote;
    RETURN_IF_ERROR(
        sub.CheckKeys({"endpoint", "model", "token_env", "timeout_seconds",
                       "retries", "max_in_flight", "response_field",
                       "context_window", "prompt_template"}));
    RETURN_IF_ERROR(sub.Read("endpoint", &options.endpoint));
    RETURN_IF_ERROR(sub.Read("model", &options.model));
    RETURN_IF_ERROR(sub.Read("token_env", &options.token_env));
    RETURN_IF_ERROR(sub.Read("timeout_seconds", &options.timeout_seconds));
    RETURN_IF_ERROR(sub.Read("retries", &options.retries));
    RETURN_IF_ERROR(sub.Read("max_in_flight", &options.max_in_flight));
    RETURN_IF_ERROR(sub.Read("response_field", &options.response_field));
    RETURN_IF_ERROR(sub.Read("prompt_template", &options.prompt_template));
    int64_t window = static_cast<int64_t>(options.context_window);
    RETURN_IF_ERROR(sub.Read("context_window", &window));
    if (window < 0) {
      return absl::InvalidArgumentError("context_window must be >= 0");
    }
    options.context_window = static_cast<size_t>(window);
  }
  return absl::OkStatus();
}

absl::Status ParseSweep(const toml::table& table, CliConfig* config) {
  TableReader reader(table, "sweep");
  RETURN_IF_ERROR(
      reader.CheckKeys({"algorithms", "epsilon_totals", "epsilon_tokens", "ms",
                        "repetitions", "jobs"}));
  std::vector<std::string> algorithms;
  RETURN_IF_ERROR(reader.Read("algorithms", &algorithms));
  for (const std::string& name : algorithms) {
    ASSIGN_OR_RETURN(Algorithm algorithm, AlgorithmFromName(name));
    config->sweep_algorithms.push_back(algorithm);
  }
  RETURN_IF_ERROR(reader.Read("epsilon_totals", &config->sweep_epsilon_totals));
  RETURN_IF_ERROR(reader.Read("epsilon_tokens", &config->sweep_epsilon_tokens));
  RETURN_IF_ERROR(reader.Read("ms", &config->sweep_ms));
  RETURN_IF_ERROR(reader.Read("repetitions", &config->repetitions));
  RETURN_IF_ERROR(reader.Read("jobs", &config->jobs));
  return absl::OkStatus();
}

}  // namespace

std::optional<int64_t> CliConfig::EffectiveVocabularySize() const {
  if (vocabulary_size.has_value()) return vocabulary_size;
  if (generator.kind == GeneratorKind::kRemote) {
    return kDefaultRemoteVocabularySize;
  }
  return std::nullopt;
}

RunConfig CliConfig::ToRunConfig() const {
  RunConfig run;
  run.algorithm = algorithm;
  run.m = m;
  run.k = k;
  run.per_token = {epsilon_token, delta_token};
  run.total = {epsilon_total, delta_total};
  run.tau = tau;
  run.t_max_cap = t_max_cap;
  run.seed = seed;
  run.vocabulary_size = EffectiveVocabularySize();
  return run;
}

ExperimentConfig CliConfig::ToExperimentConfig() const {
  ExperimentConfig experiment;
  experiment.grid.algorithms = sweep_algorithms.empty()
                                   ? std::vector<Algorithm>{algorithm}
                                   : sweep_algorithms;
  experiment.grid.epsilon_totals = sweep_epsilon_totals.empty()
                                       ? std::vector<double>{epsilon_total}
                                       : sweep_epsilon_totals;
  experiment.grid.epsilon_tokens = sweep_epsilon_tokens.empty()
                                       ? std::vector<double>{epsilon_token}
                                       : sweep_epsilon_tokens;
  experiment.grid.ms = sweep_ms.empty() ? std::vector<int>{m} : sweep_ms;
  experiment.k = k;
  experiment.delta_token = delta_token;
  experiment.delta_total = delta_total;
  experiment.tau = tau;
  experiment.t_max_cap = t_max_cap;
  experiment.vocabulary_size = EffectiveVocabularySize();
  experiment.repetitions = repetitions;
  experiment.base_seed = seed;
  experiment.jobs = jobs;
  return experiment;
}

absl::StatusOr<GeneratorKind> ParseGeneratorKind(std::string_view name) {
  if (name == "scripted") return GeneratorKind::kScripted;
  if (name == "ngram") return GeneratorKind::kNgram;
  if (name == "remote") return GeneratorKind::kRemote;
  return absl::InvalidArgumentError(
      absl::StrCat("Unknown generator kind '", ToAbsl(name),
                   "' (expected scripted, ngram or remote)"));
}

absl::StatusOr<CliConfig> ParseCliConfig(std::string_view toml_text,
                                         const fs::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& error) {
    return absl::InvalidArgumentError(
        absl::StrCat("Config syntax error at line ", error.source().begin.line,
                     ": ", ToAbsl(error.description())));
  }
  CliConfig config;
  TableReader reader(root, "");
  RETURN_IF_ERROR(reader.CheckKeys(
      {"corpus", "questions", "algorithm", "m", "k", "tau", "epsilon_token",
       "delta_token", "epsilon_total", "delta_total", "t_max_cap", "seed",
       "vocabulary_size", "output_dir", "generator", "sweep"}));
  RETURN_IF_ERROR(reader.ReadPath("corpus", base_dir, &config.corpus_path));
  RETURN_IF_ERROR(
      reader.ReadPath("questions", base_dir, &config.questions_path));
  std::string algorithm;
  RETURN_IF_ERROR(reader.Read("algorithm", &algorithm));
  if (!algorithm.empty()) {
    ASSIGN_OR_RETURN(config.algorithm, AlgorithmFromName(algorithm));
  }
  RETURN_IF_ERROR(reader.Read("m", &config.m));
  RETURN_IF_ERROR(reader.Read("k", &config.k));
  RETURN_IF_ERROR(reader.Read("tau", &config.tau));
  RETURN_IF_ERROR(reader.Read("epsilon_token", &config.epsilon_token));
  RETURN_IF_ERROR(reader.Read("delta_token", &config.delta_token));
  RETURN_IF_ERROR(reader.Read("epsilon_total", &config.epsilon_total));
  RETURN_IF_ERROR(reader.Read("delta_total", &config.delta_total));
  RETURN_IF_ERROR(reader.Read("t_max_cap", &config.t_max_cap));
  int64_t seed = 0;
  RETURN_IF_ERROR(reader.Read("seed", &seed));
  config.seed = static_cast<uint64_t>(seed);
  if (root.get("vocabulary_size") != nullptr) {
    int64_t size = 0;
    RETURN_IF_ERROR(reader.Read("vocabulary_size", &size));
    config.vocabulary_size = size;
  }
  std::optional<fs::path> output_dir;
  RETURN_IF_ERROR(reader.ReadPath("output_dir", base_dir, &output_dir));
  if (output_dir.has_value()) config.output_dir = *output_dir;

  ASSIGN_OR_RETURN(const toml::table* generator, reader.Table("generator"));
  if (generator != nullptr) {
    RETURN_IF_ERROR(ParseGenerator(*generator, base_dir, &config.generator));
  }
  ASSIGN_OR_RETURN(const toml::table* sweep, reader.Table("sweep"));
  if (sweep != nullptr) RETURN_IF_ERROR(ParseSweep(*sweep, &config));
  return config;
}

absl::StatusOr<CliConfig> LoadCliConfig(const fs::path& path) {
  ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  absl::StatusOr<CliConfig> config = ParseCliConfig(text, path.parent_path());
  if (!config.ok()) {
    return absl::Status(
        config.status().code(),
        absl::StrCat(path.string(), ": ", config.status().message()));
  }
  return config;
}

absl::Status CheckPaths(const CliConfig& config) {
  for (const std::optional<fs::path>& path :
       {config.corpus_path, config.questions_path,
        config.generator.scripted_table, config.generator.ngram_training}) {
    if (path.has_value() && !fs::exists(*path)) {
      return absl::NotFoundError(
          absl::StrCat("No such file: '", path->string(), "'"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<std::unique_ptr<Generator>> BuildGenerator(
    const GeneratorSettings& settings, std::span<const Document> corpus) {
  switch (settings.kind) {
    case GeneratorKind::kScripted: {
      if (!settings.scripted_table.has_value()) {
        return absl::InvalidArgumentError(
            "The scripted generator needs a response table");
      }
      ASSIGN_OR_RETURN(std::string json, ReadFile(*settings.scripted_table));
      ASSIGN_OR_RETURN(std::unique_ptr<ScriptedGenerator> generator,
                       ScriptedGenerator::FromJson(json));
      return std::unique_ptr<Generator>(std::move(generator));
    }
    case GeneratorKind::kNgram: {
      std::vector<std::string> corpus_texts;
      for (const Document& doc : corpus) corpus_texts.push_back(doc.text);
      std::vector<std::string> training = corpus_texts;
      if (settings.ngram_training.has_value()) {
        ASSIGN_OR_RETURN(training, LoadTrainingTexts(*settings.ngram_training));
      }
      ASSIGN_OR_RETURN(
          std::unique_ptr<NgramGenerator> generator,
          NgramGenerator::Train(training, settings.ngram, corpus_texts));
      return std::unique_ptr<Generator>(std::move(generator));
    }
    case GeneratorKind::kRemote: {
      ASSIGN_OR_RETURN(std::unique_ptr<RemoteGenerator> generator,
                       RemoteGenerator::Create(settings.remote));
      return std::unique_ptr<Generator>(std::move(generator));
    }
  }
  return absl::InvalidArgumentError("Unknown generator kind");
}

}  // namespace dprag
