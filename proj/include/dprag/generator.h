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

// The next-token generator abstraction LLM_t(question, documents, prefix) and
// the prompt rendering shared by all implementations.

#ifndef DPRAG_GENERATOR_H_
#define DPRAG_GENERATOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "dprag/document.h"
#include "dprag/token.h"
#include "dprag/vocabulary.h"

namespace dprag {

// Non-owning view of one generator call. An empty document list is the
// non-RAG case.
struct GenerationContext {
  std::string_view question;
  std::span<const Document> documents;
  std::span<const Token> prefix;
};

class Generator {
 public:
  virtual ~Generator() = default;

  // Greedy next token. Implementations are safe for concurrent calls.
  virtual absl::StatusOr<Token> NextToken(
      const GenerationContext& context) const = 0;

  virtual const Vocabulary& vocabulary() const = 0;
};

// Prompt template with {documents}, {question} and {prefix} placeholders.
// {documents} expands to each document text followed by a newline and
// {prefix} to each prefix token preceded by a space.
class PromptTemplate {
 public:
  static constexpr std::string_view kDefault =
      "{documents}Question: {question}\nAnswer:{prefix}";

  PromptTemplate() : PromptTemplate(kDefault) {}
  explicit PromptTemplate(std::string_view text) : text_(text) {}

  std::string Render(const GenerationContext& context) const;

  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

// Number of leading documents to drop so that the rendered prompt has at most
// `window` whitespace-separated words; documents are dropped oldest (first)
// first. ResourceExhausted (context overflow) if the prompt does not fit even
// without documents. A window of 0 means unlimited.
absl::StatusOr<size_t> DocumentsToDrop(const PromptTemplate& prompt,
                                       const GenerationContext& context,
                                       size_t window);

}  // namespace dprag

#endif  // DPRAG_GENERATOR_H_
