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

// Generation loops: Non-RAG, VoteRAG, DPVoteRAG and DPSparseVoteRAG. Every
// loop returns the full per-step trace alongside the answer.

#ifndef DPRAG_ENGINE_H_
#define DPRAG_ENGINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "dprag/accountant.h"
#include "dprag/generator.h"
#include "dprag/mechanisms.h"
#include "dprag/random.h"
#include "dprag/retrieval.h"

namespace dprag {

enum class Algorithm { kNonRag, kVoteRag, kDpVoteRag, kDpSparseVoteRag };

// "non-rag", "vote-rag", "dp-vote-rag", "dp-sparse-vote-rag".
std::string_view AlgorithmName(Algorithm algorithm);
std::optional<Algorithm> ParseAlgorithm(std::string_view name);

inline constexpr int kDefaultOutputCap = 64;

struct RunConfig {
  Algorithm algorithm = Algorithm::kDpSparseVoteRag;
  // Voters and documents per voter.
  int m = 1;
  int k = 1;
  PrivacyBudget per_token{1.0, 1e-5};
  PrivacyBudget total{10.0, 1e-4};
  // Sparse-vector threshold; m / 2 when unset.
  std::optional<double> tau;
  // Output cap independent of privacy (non-private loops and the sparse loop).
  int t_max_cap = kDefaultOutputCap;
  uint64_t seed = 0;
  // |V| for the LimitedDomain cutoff; the generator's vocabulary size at run
  // start when unset.
  std::optional<int64_t> vocabulary_size;

  double Tau() const { return tau.value_or(m / 2.0); }
  // Candidate-set size for LimitedDomain: the number of voters.
  int64_t KBar() const { return m; }

  absl::Status Validate() const;
};

enum class StepVerdict { kNotApplicable, kSparsePass, kPrivateVote };
enum class HaltReason { kEos, kNullToken, kBudgetExhausted, kCapReached };

std::string_view StepVerdictName(StepVerdict verdict);
std::string_view HaltReasonName(HaltReason reason);

struct StepRecord {
  int64_t index = 0;
  // One token per voter in partition order; empty for Non-RAG.
  std::vector<TokenId> voter_tokens;
  // Sparse loop only.
  std::optional<TokenId> non_rag_token;
  TokenHistogram histogram;
  StepVerdict verdict = StepVerdict::kNotApplicable;
  // std::nullopt when LimitedDomain returned the bottom candidate.
  std::optional<TokenId> emitted_token;
  // Private releases left after this step; DP loops only.
  std::optional<int64_t> budget_remaining_after;
};

struct GenerationTrace {
  std::string question;
  Algorithm algorithm = Algorithm::kNonRag;
  RunConfig config;
  std::vector<std::string> retrieved;
  VoterPartition partition;
  std::optional<CompositionPlan> plan;
  std::vector<StepRecord> steps;
  // Emitted tokens, excluding a final <eos>.
  std::vector<Token> answer;
  HaltReason halt_reason = HaltReason::kCapReached;
  // Surfaces the generator added to its vocabulary during the run.
  std::vector<std::string> vocabulary_extensions;

  // Answer surfaces joined by single spaces.
  std::string AnswerText() const;
  int64_t PrivateVotes() const;
};

// Greedy decoding with no documents until <eos> or `cap` tokens.
absl::StatusOr<GenerationTrace> RunNonRag(std::string_view question,
                                          const Generator& generator, int cap);

// Retrieves m * k documents, partitions them with `rng` and emits the
// plurality token of the m voters (ties to the lowest token id) each step.
absl::StatusOr<GenerationTrace> RunVoteRag(std::string_view question,
                                           const Retriever& retriever,
                                           const Generator& generator, int m,
                                           int k, Rng& rng, int cap);

// Every token is chosen privately by LimitedDomain at the per-token budget;
// the run stops after the accountant's maximum number of compositions.
absl::StatusOr<GenerationTrace> RunDpVoteRag(std::string_view question,
                                             const Retriever& retriever,
                                             const Generator& generator,
                                             const RunConfig& config);

// Emits the no-document token for free while the voters agree with it (as
// judged by the sparse-vector gate with half the per-token epsilon) and falls
// back to a private LimitedDomain vote with the other half otherwise. Only
// private votes are charged.
absl::StatusOr<GenerationTrace> RunDpSparseVoteRag(std::string_view question,
                                                   const Retriever& retriever,
                                                   const Generator& generator,
                                                   const RunConfig& config);

// Dispatches on config.algorithm. `retriever` may be null for Non-RAG. All
// randomness derives from config.seed: DeriveSeed(seed, "partition"),
// DeriveSeed(seed, "threshold") and DeriveSeed(seed, "selection").
absl::StatusOr<GenerationTrace> Run(std::string_view question,
                                    const Retriever* retriever,
                                    const Generator& generator,
                                    const RunConfig& config);

}  // namespace dprag

#endif  // DPRAG_ENGINE_H_
