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

// The QA sweep: runs every question of a question set over a grid of
// (algorithm, epsilon_total, epsilon_token, m) cells and aggregates match
// accuracy over repetitions.

#ifndef DPRAG_EXPERIMENT_H_
#define DPRAG_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dprag/engine.h"
#include "dprag/evaluation.h"
#include "dprag/generator.h"
#include "dprag/retrieval.h"

namespace dprag {

struct SweepGrid {
  std::vector<Algorithm> algorithms;
  std::vector<double> epsilon_totals;
  std::vector<double> epsilon_tokens;
  std::vector<int> ms;
};

struct ExperimentConfig {
  SweepGrid grid;
  int k = 1;
  double delta_token = 1e-5;
  double delta_total = 1e-4;
  std::optional<double> tau;
  int t_max_cap = kDefaultOutputCap;
  std::optional<int64_t> vocabulary_size;
  int repetitions = 3;
  uint64_t base_seed = 0;
  // Worker threads per cell.
  int jobs = 1;
  // Per-run traces are written here when set.
  std::optional<std::filesystem::path> trace_dir;

  absl::Status Validate() const;
};

struct CellResult {
  Algorithm algorithm = Algorithm::kNonRag;
  double epsilon_total = 0.0;
  double epsilon_token = 0.0;
  int m = 0;
  int k = 0;
  double tau = 0.0;
  // Over repetitions; each repetition's accuracy is the fraction of
  // questions answered correctly, failed runs counting as misses.
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  // Over successful runs.
  double mean_tokens = 0.0;
  double mean_private_votes = 0.0;
  int64_t error_count = 0;
  // "q<index> r<repetition>: <status>" for each failed run, in order.
  std::vector<std::string> errors;
};

// Seed of one (question, repetition) run.
uint64_t RunSeed(uint64_t base_seed, size_t question_index, int repetition);

// Cells are emitted algorithm-major, then epsilon_total, epsilon_token and m
// in the order given. `retriever` may be null only if every algorithm is
// Non-RAG. Per-run failures are counted, not returned.
absl::StatusOr<std::vector<CellResult>> RunExperiment(
    const ExperimentConfig& config, std::span<const QaExample> questions,
    const Retriever* retriever, const Generator& generator);

inline constexpr std::string_view kResultsCsvHeader =
    "algorithm,epsilon_total,epsilon_token,m,k,tau,accuracy_mean,"
    "accuracy_std,mean_tokens,mean_private_votes,error_count";

// Header line plus one line per cell.
std::string ResultsCsv(std::span<const CellResult> cells);

}  // namespace dprag

#endif  // DPRAG_EXPERIMENT_H_
