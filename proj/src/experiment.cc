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

#include "dprag/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dprag/random.h"
#include "dprag/string_compat.h"
#include "dprag/trace_io.h"

namespace dprag {
namespace {

struct RunOutcome {
  absl::Status status;
  int correct = 0;
  size_t tokens = 0;
  int64_t private_votes = 0;
};

RunOutcome RunOne(const RunConfig& run_config, const QaExample& question,
                  const Retriever* retriever, const Generator& generator,
                  const std::optional<std::filesystem::path>& trace_dir) {
  RunOutcome outcome;
  absl::StatusOr<GenerationTrace> trace =
      Run(question.question, retriever, generator, run_config);
  if (!trace.ok()) {
    outcome.status = trace.status();
    return outcome;
  }
  if (trace_dir.has_value()) {
    absl::StatusOr<std::filesystem::path> written =
        WriteTrace(*trace, generator.vocabulary(), *trace_dir);
    if (!written.ok()) {
      outcome.status = written.status();
      return outcome;
    }
  }
  outcome.correct = MatchAccuracy(trace->AnswerText(), question.answers);
  outcome.tokens = trace->answer.size();
  outcome.private_votes = trace->PrivateVotes();
  return outcome;
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads.
template <typename Fn>
void ParallelFor(size_t count, int jobs, Fn fn) {
  const size_t workers =
      std::min<size_t>(count, static_cast<size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (std::thread& thread : threads) thread.join();
}

}  // namespace

absl::Status ExperimentConfig::Validate() const {
  if (grid.algorithms.empty() || grid.epsilon_totals.empty() ||
      grid.epsilon_tokens.empty() || grid.ms.empty()) {
    return absl::InvalidArgumentError("Every sweep grid axis needs a value");
  }
  if (repetitions < 1) {
    return absl::InvalidArgumentError("repetitions must be >= 1");
  }
  if (jobs < 1) return absl::InvalidArgumentError("jobs must be >= 1");
  return absl::OkStatus();
}

uint64_t RunSeed(uint64_t base_seed, size_t question_index, int repetition) {
  return DeriveSeed(DeriveSeed(base_seed, "question", question_index),
                    "repetition", static_cast<uint64_t>(repetition));
}

absl::StatusOr<std::vector<CellResult>> RunExperiment(
    const ExperimentConfig& config, std::span<const QaExample> questions,
    const Retriever* retriever, const Generator& generator) {
  if (absl::Status status = config.Validate(); !status.ok()) return status;
  if (questions.empty()) {
    return absl::InvalidArgumentError("The question set is empty");
  }
  if (retriever == nullptr) {
    for (Algorithm algorithm : config.grid.algorithms) {
      if (algorithm != Algorithm::kNonRag) {
        return absl::InvalidArgumentError(
            absl::StrCat(ToAbsl(AlgorithmName(algorithm)),
                         " needs a corpus to retrieve from"));
      }
    }
  }

  std::vector<CellResult> cells;
  const size_t reps = static_cast<size_t>(config.repetitions);
  for (Algorithm algorithm : config.grid.algorithms) {
    for (double epsilon_total : config.grid.epsilon_totals) {
      for (double epsilon_token : config.grid.epsilon_tokens) {
        for (int m : config.grid.ms) {
          RunConfig base;
          base.algorithm = algorithm;
          base.m = m;
          base.k = config.k;
          base.per_token = {epsilon_token, config.delta_token};
          base.total = {epsilon_total, config.delta_total};
          base.tau = config.tau;
          base.t_max_cap = config.t_max_cap;
          base.vocabulary_size = config.vocabulary_size;

          // Indexed by question * reps + repetition so the aggregation
          // below never depends on scheduling.
          std::vector<RunOutcome> outcomes(questions.size() * reps);
          ParallelFor(outcomes.size(), config.jobs, [&](size_t i) {
            RunConfig run_config = base;
            run_config.seed =
                RunSeed(config.base_seed, i / reps, static_cast<int>(i % reps));
            outcomes[i] = RunOne(run_config, questions[i / reps], retriever,
                                 generator, config.trace_dir);
          });

          CellResult cell;
          cell.algorithm = algorithm;
          cell.epsilon_total = epsilon_total;
          cell.epsilon_token = epsilon_token;
          cell.m = m;
          cell.k = config.k;
          cell.tau = base.Tau();
          std::vector<double> accuracy(reps, 0.0);
          double tokens = 0.0;
          double votes = 0.0;
          for (size_t i = 0; i < outcomes.size(); ++i) {
            const RunOutcome& outcome = outcomes[i];
            if (!outcome.status.ok()) {
              ++cell.error_count;
              cell.errors.push_back(absl::StrFormat("q%d r%d: %s", i / reps,
                                                    i % reps,
                                                    outcome.status.ToString()));
              continue;
            }
            accuracy[i % reps] += outcome.correct;
            tokens += static_cast<double>(outcome.tokens);
            votes += static_cast<double>(outcome.private_votes);
          }
          for (double& value : accuracy) {
            value /= static_cast<double>(questions.size());
          }
          double sum = 0.0;
          for (double value : accuracy) sum += value;
          cell.accuracy_mean = sum / static_cast<double>(reps);
          if (reps > 1) {
            double squares = 0.0;
            for (double value : accuracy) {
              squares +=
                  (value - cell.accuracy_mean) * (value - cell.accuracy_mean);
            }
            cell.accuracy_std =
                std::sqrt(squares / static_cast<double>(reps - 1));
          }
          const int64_t succeeded =
              static_cast<int64_t>(outcomes.size()) - cell.error_count;
          if (succeeded > 0) {
            cell.mean_tokens = tokens / static_cast<double>(succeeded);
            cell.mean_private_votes = votes / static_cast<double>(succeeded);
          }
          cells.push_back(std::move(cell));
        }
      }
    }
  }
  return cells;
}

std::string ResultsCsv(std::span<const CellResult> cells) {
  std::string csv = absl::StrCat(ToAbsl(kResultsCsvHeader), "\n");
  for (const CellResult& cell : cells) {
    absl::StrAppendFormat(&csv, "%s,%g,%g,%d,%d,%g,%.6f,%.6f,%.6f,%.6f,%d\n",
                          ToAbsl(AlgorithmName(cell.algorithm)),
                          cell.epsilon_total, cell.epsilon_token, cell.m,
                          cell.k, cell.tau, cell.accuracy_mean,
                          cell.accuracy_std, cell.mean_tokens,
                          cell.mean_private_votes, cell.error_count);
  }
  return csv;
}

}  // namespace dprag
