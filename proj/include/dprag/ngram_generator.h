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

#ifndef DPRAG_NGRAM_GENERATOR_H_
#define DPRAG_NGRAM_GENERATOR_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"
#include "dprag/generator.h"
#include "dprag/vocabulary.h"

namespace dprag {

struct NgramOptions {
  // n of the n-gram model; histories are the last n - 1 words.
  int order = 3;
  // Add-alpha smoothing constant.
  double alpha = 1.0;
  // Weight of n-gram counts observed in the context documents relative to
  // the trained counts.
  double context_weight = 1.0;
  // Prompt window in words, 0 for unlimited.
  size_t context_window = 0;
};

// Word-level n-gram model with greedy decoding.
//
// The next token is the arg-max, over the vocabulary, of the trained counts
// for the current history plus `context_weight` times the counts of the same
// history observed inside the context documents. The history is the tail of
// question + prefix; if it was never observed, the model backs off to shorter
// histories down to the unigram. Ties go to the lowest token id. Every
// training text and every document ends with an implicit <eos>.
class NgramGenerator : public Generator {
 public:
  // InvalidArgument on an empty corpus, order < 1 or alpha <= 0.
  // `vocabulary_texts` are scanned for extra words (after the training texts)
  // so that tokens copied from context documents are in the vocabulary.
  static absl::StatusOr<std::unique_ptr<NgramGenerator>> Train(
      std::span<const std::string> texts, const NgramOptions& options,
      std::span<const std::string> vocabulary_texts = {});

  absl::StatusOr<Token> NextToken(
      const GenerationContext& context) const override;

  const Vocabulary& vocabulary() const override { return vocabulary_; }

  // Add-alpha smoothed P(next | history) from the trained counts, with the
  // history truncated to its last order - 1 tokens.
  double Probability(std::span<const TokenId> history, TokenId next) const;

  const NgramOptions& options() const { return options_; }

 private:
  using History = std::vector<TokenId>;
  struct HistoryHash {
    size_t operator()(const History& history) const;
  };
  struct Continuations {
    std::map<TokenId, int64_t> next;
    int64_t total = 0;
  };

  explicit NgramGenerator(const NgramOptions& options) : options_(options) {}

  std::vector<TokenId> Encode(std::string_view text) const;

  NgramOptions options_;
  Vocabulary vocabulary_;
  std::unordered_map<History, Continuations, HistoryHash> counts_;
};

}  // namespace dprag

#endif  // DPRAG_NGRAM_GENERATOR_H_
