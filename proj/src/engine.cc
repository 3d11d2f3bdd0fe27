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

#include "dprag/engine.h"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "dprag/status_macros.h"
#include "dprag/string_compat.h"

namespace dprag {
namespace {

// Documents handed to each voter, in partition order.
struct VoterDocuments {
  std::vector<std::vector<Document>> subsets;
};

absl::StatusOr<VoterDocuments> RetrieveAndPartition(std::string_view question,
                                                    const Retriever& retriever,
                                                    int m, int k, Rng& rng,
                                                    GenerationTrace& trace) {
  if (m < 1 || k < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("Need m >= 1 and k >= 1, got m=%d k=%d", m, k));
  }
  const size_t needed = static_cast<size_t>(m) * static_cast<size_t>(k);
  ASSIGN_OR_RETURN(RetrievalResult retrieved,
                   retriever.Retrieve(question, needed));
  ASSIGN_OR_RETURN(trace.partition, Partition(retrieved, m, k, rng));
  trace.retrieved = std::move(retrieved.ranked);

  VoterDocuments voters;
  voters.subsets.reserve(trace.partition.subsets.size());
  for (const auto& subset : trace.partition.subsets) {
    std::vector<Document> docs;
    docs.reserve(subset.size());
    for (const std::string& id : subset) {
      const Document* doc = retriever.Find(id);
      if (doc == nullptr) {
        return absl::InternalError(
            absl::StrFormat("Retriever returned unknown doc_id '%s'", id));
      }
      docs.push_back(*doc);
    }
    voters.subsets.push_back(std::move(docs));
  }
  return voters;
}

absl::StatusOr<std::vector<TokenId>> CollectVotes(
    std::string_view question, const VoterDocuments& voters,
    const Generator& generator, const std::vector<Token>& prefix) {
  std::vector<TokenId> votes;
  votes.reserve(voters.subsets.size());
  for (const auto& docs : voters.subsets) {
    ASSIGN_OR_RETURN(const Token token,
                     generator.NextToken({question, docs, prefix}));
    votes.push_back(token.id);
  }
  return votes;
}

GenerationTrace StartTrace(std::string_view question, const RunConfig& config) {
  GenerationTrace trace;
  trace.question = std::string(question);
  trace.algorithm = config.algorithm;
  trace.config = config;
  return trace;
}

void Emit(const Generator& generator, TokenId token, GenerationTrace& trace,
          std::vector<Token>& prefix) {
  if (token == kEosId) return;
  Token emitted = generator.vocabulary().MakeToken(token);
  prefix.push_back(emitted);
  trace.answer.push_back(std::move(emitted));
}

int64_t VocabularySize(const RunConfig& config, const Generator& generator) {
  return config.vocabulary_size.value_or(
      static_cast<int64_t>(generator.vocabulary().size()));
}

}  // namespace

std::string_view AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kNonRag:
      return "non-rag";
    case Algorithm::kVoteRag:
      return "vote-rag";
    case Algorithm::kDpVoteRag:
      return "dp-vote-rag";
    case Algorithm::kDpSparseVoteRag:
      return "dp-sparse-vote-rag";
  }
  return "unknown";
}

std::optional<Algorithm> ParseAlgorithm(std::string_view name) {
  for (Algorithm algorithm :
       {Algorithm::kNonRag, Algorithm::kVoteRag, Algorithm::kDpVoteRag,
        Algorithm::kDpSparseVoteRag}) {
    if (AlgorithmName(algorithm) == name) return algorithm;
  }
  return std::nullopt;
}

std::string_view StepVerdictName(StepVerdict verdict) {
  switch (verdict) {
    case StepVerdict::kNotApplicable:
      return "n/a";
    case StepVerdict::kSparsePass:
      return "sparse-pass";
    case StepVerdict::kPrivateVote:
      return "private-vote";
  }
  return "unknown";
}

std::string_view HaltReasonName(HaltReason reason) {
  switch (reason) {
    case HaltReason::kEos:
      return "eos";
    case HaltReason::kNullToken:
      return "null-token";
    case HaltReason::kBudgetExhausted:
      return "budget-exhausted";
    case HaltReason::kCapReached:
      return "cap-reached";
  }
  return "unknown";
}

absl::Status RunConfig::Validate() const {
  if (m < 1 || k < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("Need m >= 1 and k >= 1, got m=%d k=%d", m, k));
  }
  if (t_max_cap < 1) {
    return absl::InvalidArgumentError("t_max_cap must be at least 1");
  }
  if (vocabulary_size.has_value() && *vocabulary_size < 1) {
    return absl::InvalidArgumentError("vocabulary_size must be at least 1");
  }
  if (algorithm == Algorithm::kDpVoteRag ||
      algorithm == Algorithm::kDpSparseVoteRag) {
    RETURN_IF_ERROR(per_token.Validate());
    RETURN_IF_ERROR(total.Validate());
    if (per_token.delta <= 0.0) {
      return absl::InvalidArgumentError(
          "Per-token delta must be positive for LimitedDomain");
    }
    if (!std::isfinite(Tau())) {
      return absl::InvalidArgumentError("tau must be finite");
    }
  }
  return absl::OkStatus();
}

std::string GenerationTrace::AnswerText() const {
  std::string text;
  for (const Token& token : answer) {
    if (!text.empty()) text += ' ';
    text += token.surface;
  }
  return text;
}

int64_t GenerationTrace::PrivateVotes() const {
  int64_t votes = 0;
  for (const StepRecord& step : steps) {
    if (step.verdict == StepVerdict::kPrivateVote) ++votes;
  }
  return votes;
}

absl::StatusOr<GenerationTrace> RunNonRag(std::string_view question,
                                          const Generator& generator, int cap) {
  RunConfig config;
  config.algorithm = Algorithm::kNonRag;
  config.t_max_cap = cap;
  RETURN_IF_ERROR(config.Validate());
  GenerationTrace trace = StartTrace(question, config);
  const auto initial_vocabulary =
      static_cast<TokenId>(generator.vocabulary().size());

  std::vector<Token> prefix;
  trace.halt_reason = HaltReason::kCapReached;
  for (int t = 0; t < cap; ++t) {
    ASSIGN_OR_RETURN(const Token token,
                     generator.NextToken({question, {}, prefix}));
    StepRecord step;
    step.index = t;
    step.emitted_token = token.id;
    trace.steps.push_back(std::move(step));
    Emit(generator, token.id, trace, prefix);
    if (token.is_eos()) {
      trace.halt_reason = HaltReason::kEos;
      break;
    }
  }
  trace.vocabulary_extensions =
      generator.vocabulary().SurfacesFrom(initial_vocabulary);
  return trace;
}

absl::StatusOr<GenerationTrace> RunVoteRag(std::string_view question,
                                           const Retriever& retriever,
                                           const Generator& generator, int m,
                                           int k, Rng& rng, int cap) {
  RunConfig config;
  config.algorithm = Algorithm::kVoteRag;
  config.m = m;
  config.k = k;
  config.t_max_cap = cap;
  RETURN_IF_ERROR(config.Validate());
  GenerationTrace trace = StartTrace(question, config);
  const auto initial_vocabulary =
      static_cast<TokenId>(generator.vocabulary().size());
  ASSIGN_OR_RETURN(const VoterDocuments voters,
                   RetrieveAndPartition(question, retriever, m, k, rng, trace));

  std::vector<Token> prefix;
  trace.halt_reason = HaltReason::kCapReached;
  for (int t = 0; t < cap; ++t) {
    StepRecord step;
    step.index = t;
    ASSIGN_OR_RETURN(step.voter_tokens,
                     CollectVotes(question, voters, generator, prefix));
    step.histogram = TokenHistogram::FromVotes(step.voter_tokens);
    const TokenId token = step.histogram.Plurality();
    step.emitted_token = token;
    trace.steps.push_back(std::move(step));
    Emit(generator, token, trace, prefix);
    if (token == kEosId) {
      trace.halt_reason = HaltReason::kEos;
      break;
    }
  }
  trace.vocabulary_extensions =
      generator.vocabulary().SurfacesFrom(initial_vocabulary);
  return trace;
}

absl::StatusOr<GenerationTrace> RunDpVoteRag(std::string_view question,
                                             const Retriever& retriever,
                                             const Generator& generator,
                                             const RunConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  GenerationTrace trace = StartTrace(question, config);
  trace.algorithm = Algorithm::kDpVoteRag;
  trace.config.algorithm = Algorithm::kDpVoteRag;
  ASSIGN_OR_RETURN(const CompositionPlan plan,
                   MaxCompositions(config.per_token, config.total));
  trace.plan = plan;
  PrivacyLedger ledger(plan);
  const auto initial_vocabulary =
      static_cast<TokenId>(generator.vocabulary().size());
  const LimitedDomainConfig selection{config.KBar(), config.per_token,
                                      VocabularySize(config, generator)};

  Rng partition_rng(DeriveSeed(config.seed, "partition"));
  Rng selection_rng(DeriveSeed(config.seed, "selection"));
  ASSIGN_OR_RETURN(const VoterDocuments voters,
                   RetrieveAndPartition(question, retriever, config.m, config.k,
                                        partition_rng, trace));

  std::vector<Token> prefix;
  trace.halt_reason = HaltReason::kBudgetExhausted;
  for (int64_t t = 0; ledger.remaining() > 0; ++t) {
    if (t >= config.t_max_cap) {
      trace.halt_reason = HaltReason::kCapReached;
      break;
    }
    StepRecord step;
    step.index = t;
    ASSIGN_OR_RETURN(step.voter_tokens,
                     CollectVotes(question, voters, generator, prefix));
    step.histogram = TokenHistogram::FromVotes(step.voter_tokens);
    ASSIGN_OR_RETURN(
        step.emitted_token,
        LimitedDomainTop1(step.histogram, selection, selection_rng));
    RETURN_IF_ERROR(ledger.Consume(t));
    step.verdict = StepVerdict::kPrivateVote;
    step.budget_remaining_after = ledger.remaining();
    const std::optional<TokenId> token = step.emitted_token;
    trace.steps.push_back(std::move(step));
    if (!token.has_value()) {
      trace.halt_reason = HaltReason::kNullToken;
      break;
    }
    Emit(generator, *token, trace, prefix);
    if (*token == kEosId) {
      trace.halt_reason = HaltReason::kEos;
      break;
    }
  }
  trace.vocabulary_extensions =
      generator.vocabulary().SurfacesFrom(initial_vocabulary);
  return trace;
}

absl::StatusOr<GenerationTrace> RunDpSparseVoteRag(std::string_view question,
                                                   const Retriever& retriever,
                                                   const Generator& generator,
                                                   const RunConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  GenerationTrace trace = StartTrace(question, config);
  trace.algorithm = Algorithm::kDpSparseVoteRag;
  trace.config.algorithm = Algorithm::kDpSparseVoteRag;
  // c_max is computed on the full per-token budget; each private step spends
  // half of epsilon on the vote and half on the threshold gate.
  ASSIGN_OR_RETURN(const CompositionPlan plan,
                   MaxCompositions(config.per_token, config.total));
  trace.plan = plan;
  PrivacyLedger ledger(plan);
  const auto initial_vocabulary =
      static_cast<TokenId>(generator.vocabulary().size());
  const PrivacyBudget vote_budget{config.per_token.epsilon / 2.0,
                                  config.per_token.delta};
  const double threshold_epsilon = config.per_token.epsilon / 2.0;
  const LimitedDomainConfig selection{config.KBar(), vote_budget,
                                      VocabularySize(config, generator)};

  Rng partition_rng(DeriveSeed(config.seed, "partition"));
  Rng threshold_rng(DeriveSeed(config.seed, "threshold"));
  Rng selection_rng(DeriveSeed(config.seed, "selection"));
  ASSIGN_OR_RETURN(
      NoisyThreshold threshold,
      NoisyThreshold::Create(config.Tau(), threshold_epsilon, threshold_rng));
  ASSIGN_OR_RETURN(const VoterDocuments voters,
                   RetrieveAndPartition(question, retriever, config.m, config.k,
                                        partition_rng, trace));

  std::vector<Token> prefix;
  trace.halt_reason = HaltReason::kCapReached;
  for (int64_t t = 0; t < config.t_max_cap; ++t) {
    StepRecord step;
    step.index = t;
    ASSIGN_OR_RETURN(const Token non_rag,
                     generator.NextToken({question, {}, prefix}));
    step.non_rag_token = non_rag.id;
    ASSIGN_OR_RETURN(step.voter_tokens,
                     CollectVotes(question, voters, generator, prefix));
    step.histogram = TokenHistogram::FromVotes(step.voter_tokens);

    ASSIGN_OR_RETURN(
        const ThresholdVerdict verdict,
        threshold.Query(step.histogram.count(non_rag.id), threshold_rng));
    if (verdict == ThresholdVerdict::kBelow) {
      ASSIGN_OR_RETURN(
          step.emitted_token,
          LimitedDomainTop1(step.histogram, selection, selection_rng));
      RETURN_IF_ERROR(ledger.Consume(t));
      threshold.Reinitialize(threshold_rng);
      step.verdict = StepVerdict::kPrivateVote;
    } else {
      step.emitted_token = non_rag.id;
      ledger.RecordSparsePass(t);
      step.verdict = StepVerdict::kSparsePass;
    }
    step.budget_remaining_after = ledger.remaining();
    const std::optional<TokenId> token = step.emitted_token;
    trace.steps.push_back(std::move(step));

    if (!token.has_value()) {
      trace.halt_reason = HaltReason::kNullToken;
      break;
    }
    Emit(generator, *token, trace, prefix);
    if (*token == kEosId) {
      trace.halt_reason = HaltReason::kEos;
      break;
    }
    if (ledger.remaining() == 0) {
      trace.halt_reason = HaltReason::kBudgetExhausted;
      break;
    }
  }
  trace.vocabulary_extensions =
      generator.vocabulary().SurfacesFrom(initial_vocabulary);
  return trace;
}

absl::StatusOr<GenerationTrace> Run(std::string_view question,
                                    const Retriever* retriever,
                                    const Generator& generator,
                                    const RunConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  if (config.algorithm != Algorithm::kNonRag && retriever == nullptr) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%s needs a retriever", ToAbsl(AlgorithmName(config.algorithm))));
  }
  switch (config.algorithm) {
    case Algorithm::kNonRag: {
      ASSIGN_OR_RETURN(GenerationTrace trace,
                       RunNonRag(question, generator, config.t_max_cap));
      trace.config = config;
      return trace;
    }
    case Algorithm::kVoteRag: {
      Rng rng(DeriveSeed(config.seed, "partition"));
      ASSIGN_OR_RETURN(GenerationTrace trace,
                       RunVoteRag(question, *retriever, generator, config.m,
                                  config.k, rng, config.t_max_cap));
      trace.config = config;
      return trace;
    }
    case Algorithm::kDpVoteRag:
      return RunDpVoteRag(question, *retriever, generator, config);
    case Algorithm::kDpSparseVoteRag:
      return RunDpSparseVoteRag(question, *retriever, generator, config);
  }
  return absl::InvalidArgumentError("Unknown algorithm");
}

}  // namespace dprag
