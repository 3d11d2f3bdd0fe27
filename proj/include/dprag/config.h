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

// Command-line configuration: a TOML file with per-flag overrides.

#ifndef DPRAG_CONFIG_H_
#define DPRAG_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dprag/document.h"
#include "dprag/engine.h"
#include "dprag/experiment.h"
#include "dprag/generator.h"
#include "dprag/ngram_generator.h"
#include "dprag/remote_generator.h"

namespace dprag {

// Vocabulary size of common BPE tokenizers.
inline constexpr int64_t kDefaultRemoteVocabularySize = 50272;

enum class GeneratorKind { kScripted, kNgram, kRemote };

struct GeneratorSettings {
  GeneratorKind kind = GeneratorKind::kNgram;
  // Scripted: JSON response table.
  std::optional<std::filesystem::path> scripted_table;
  // N-gram: training texts; the corpus is used when unset.
  std::optional<std::filesystem::path> ngram_training;
  NgramOptions ngram;
  RemoteGeneratorOptions remote;
};

struct CliConfig {
  std::optional<std::filesystem::path> corpus_path;
  std::optional<std::filesystem::path> questions_path;
  Algorithm algorithm = Algorithm::kDpSparseVoteRag;
  int m = 1;
  int k = 1;
  std::optional<double> tau;
  double epsilon_token = 1.0;
  double delta_token = 1e-5;
  double epsilon_total = 10.0;
  double delta_total = 1e-4;
  int t_max_cap = kDefaultOutputCap;
  uint64_t seed = 0;
  // |V| for the LimitedDomain cutoff. A remote model's vocabulary is only
  // discovered as it answers, so remote runs fall back to
  // kDefaultRemoteVocabularySize.
  std::optional<int64_t> vocabulary_size;
  std::filesystem::path output_dir = "dprag-out";
  GeneratorSettings generator;

  // Sweep axes; empty means the single value above.
  std::vector<Algorithm> sweep_algorithms;
  std::vector<double> sweep_epsilon_totals;
  std::vector<double> sweep_epsilon_tokens;
  std::vector<int> sweep_ms;
  int repetitions = 3;
  int jobs = 1;

  std::optional<int64_t> EffectiveVocabularySize() const;
  RunConfig ToRunConfig() const;
  ExperimentConfig ToExperimentConfig() const;
};

// Parses a TOML config. Relative paths resolve against the file's directory.
// InvalidArgument on syntax errors, unknown keys and wrongly typed values.
absl::StatusOr<CliConfig> ParseCliConfig(std::string_view toml_text,
                                         const std::filesystem::path& base_dir);
absl::StatusOr<CliConfig> LoadCliConfig(const std::filesystem::path& path);

// NotFound if a referenced input file does not exist.
absl::Status CheckPaths(const CliConfig& config);

absl::StatusOr<GeneratorKind> ParseGeneratorKind(std::string_view name);

// Builds the configured generator. `corpus` trains the n-gram model when no
// training file is configured and is always added to its vocabulary.
absl::StatusOr<std::unique_ptr<Generator>> BuildGenerator(
    const GeneratorSettings& settings, std::span<const Document> corpus);

}  // namespace dprag

#endif  // DPRAG_CONFIG_H_
