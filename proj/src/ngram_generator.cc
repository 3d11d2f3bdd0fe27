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

#include "dprag/ngram_generator.h"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "dprag/status_macros.h"

namespace dprag {
namespace {

// Marks words outside the vocabulary; never matches a history and is never
// emitted.
constexpr TokenId kUnknown = -1;

bool EndsWith(std::span<const TokenId> sequence, size_t end,
              std::span<const TokenId> suffix) {
  if (suffix.size() > end) return false;
  return std::equal(
      suffix.begin(), suffix.end(),
      sequence.begin() + static_cast<ptrdiff_t>(end - suffix.size()));
}

}  // namespace

size_t NgramGenerator::HistoryHash::operator()(const History& history) const {
  size_t hash = 0xcbf29ce484222325ULL;
  for (TokenId id : history) {
    hash ^= static_cast<size_t>(static_cast<uint32_t>(id));
    hash *= 0x100000001b3ULL;
  }
  return hash ^ history.size();
}

absl::StatusOr<std::unique_ptr<NgramGenerator>> NgramGenerator::Train(
    std::span<const std::string> texts, const NgramOptions& options,
    std::span<const std::string> vocabulary_texts) {
  if (options.order < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "n-gram order must be at least 1, got %d", options.order));
  }
  if (!(options.alpha > 0.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "Smoothing alpha must be positive, got %g", options.alpha));
  }
  if (!(options.context_weight >= 0.0)) {
    return absl::InvalidArgumentError("Context weight must be non-negative");
  }
  std::unique_ptr<NgramGenerator> model(new NgramGenerator(options));
  std::vector<std::vector<TokenId>> encoded;
  for (const std::string& text : texts) {
    std::vector<TokenId> sequence;
    for (const std::string& word : SplitWords(text)) {
      sequence.push_back(model->vocabulary_.Intern(word));
    }
    if (sequence.empty()) continue;
    sequence.push_back(kEosId);
    encoded.push_back(std::move(sequence));
  }
  if (encoded.empty()) {
    return absl::InvalidArgumentError(
        "n-gram training corpus contains no words");
  }
  for (const std::string& text : vocabulary_texts) {
    for (const std::string& word : SplitWords(text)) {
      model->vocabulary_.Intern(word);
    }
  }

  const size_t max_history = static_cast<size_t>(options.order - 1);
  for (const auto& sequence : encoded) {
    for (size_t i = 0; i < sequence.size(); ++i) {
      for (size_t len = 0; len <= std::min(max_history, i); ++len) {
        History history(sequence.begin() + static_cast<ptrdiff_t>(i - len),
                        sequence.begin() + static_cast<ptrdiff_t>(i));
        Continuations& entry = model->counts_[std::move(history)];
        ++entry.next[sequence[i]];
        ++entry.total;
      }
    }
  }
  return model;
}

std::vector<TokenId> NgramGenerator::Encode(std::string_view text) const {
  std::vector<TokenId> ids;
  for (const std::string& word : SplitWords(text)) {
    ids.push_back(vocabulary_.Find(word).value_or(kUnknown));
  }
  return ids;
}

absl::StatusOr<Token> NgramGenerator::NextToken(
    const GenerationContext& context) const {
  PromptTemplate prompt;
  ASSIGN_OR_RETURN(const size_t dropped,
                   DocumentsToDrop(prompt, context, options_.context_window));

  std::vector<TokenId> sequence = Encode(context.question);
  for (const Token& token : context.prefix) {
    sequence.push_back(vocabulary_.Find(token.surface).value_or(kUnknown));
  }
  std::vector<std::vector<TokenId>> documents;
  for (const Document& doc : context.documents.subspan(dropped)) {
    std::vector<TokenId> encoded = Encode(doc.text);
    if (encoded.empty()) continue;
    encoded.push_back(kEosId);
    documents.push_back(std::move(encoded));
  }

  const size_t max_history =
      std::min(static_cast<size_t>(options_.order - 1), sequence.size());
  for (size_t len = max_history + 1; len-- > 0;) {
    const std::span<const TokenId> history =
        std::span<const TokenId>(sequence).last(len);
    if (std::find(history.begin(), history.end(), kUnknown) != history.end()) {
      continue;
    }
    std::map<TokenId, double> scores;
    auto trained = counts_.find(History(history.begin(), history.end()));
    if (trained != counts_.end()) {
      for (const auto& [next, count] : trained->second.next) {
        scores[next] += static_cast<double>(count);
      }
    }
    if (options_.context_weight > 0.0) {
      for (const auto& doc : documents) {
        for (size_t i = 0; i < doc.size(); ++i) {
          if (doc[i] == kUnknown || !EndsWith(doc, i, history)) continue;
          scores[doc[i]] += options_.context_weight;
        }
      }
    }
    TokenId best = kUnknown;
    double best_score = 0.0;
    for (const auto& [next, score] : scores) {
      if (score > best_score) {
        best = next;
        best_score = score;
      }
    }
    if (best != kUnknown) return vocabulary_.MakeToken(best);
  }
  return vocabulary_.MakeToken(kEosId);
}

double NgramGenerator::Probability(std::span<const TokenId> history,
                                   TokenId next) const {
  const size_t len =
      std::min(static_cast<size_t>(options_.order - 1), history.size());
  const auto tail = history.last(len);
  const double vocab = static_cast<double>(vocabulary_.size());
  auto it = counts_.find(History(tail.begin(), tail.end()));
  if (it == counts_.end()) return 1.0 / vocab;
  auto next_it = it->second.next.find(next);
  const double count = next_it == it->second.next.end()
                           ? 0.0
                           : static_cast<double>(next_it->second);
  return (count + options_.alpha) /
         (static_cast<double>(it->second.total) + options_.alpha * vocab);
}

}  // namespace dprag
