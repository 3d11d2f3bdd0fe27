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

#ifndef DPRAG_SCRIPTED_GENERATOR_H_
#define DPRAG_SCRIPTED_GENERATOR_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "absl/status/statusor.h"
#include "dprag/generator.h"
#include "dprag/vocabulary.h"

namespace dprag {

// Lookup-table generator for tests and reproducible demos.
//
// Entries are matched in this order:
//   1. the FNV-1a hash of the rendered prompt (hex, 16 digits);
//   2. (question, exact set of document ids, prefix);
//   3. (question, any non-empty document set, prefix);
//   4. the same two rules with the question wildcard "*";
// and the fallback token otherwise. An empty document set is the non-RAG
// context.
//
// JSON table format:
//   {"fallback": "<eos>",
//    "entries": [
//      {"context_hash": "89ab...", "token": "novel"},
//      {"question": "q", "documents": ["d1"], "prefix": ["the"],
//       "token": "great"},
//      {"question": "*", "documents": "*", "prefix": [], "token": "the"}]}
class ScriptedGenerator : public Generator {
 public:
  static constexpr std::string_view kWildcard = "*";

  explicit ScriptedGenerator(std::string_view fallback = kEosSurface,
                             PromptTemplate prompt = PromptTemplate());

  // Loads the JSON table. InvalidArgument on malformed tables.
  static absl::StatusOr<std::unique_ptr<ScriptedGenerator>> FromJson(
      std::string_view json_text);

  // Registers a response. `documents` == std::nullopt matches any non-empty
  // document set; an empty vector matches the non-RAG context.
  void Add(std::string_view question,
           std::optional<std::vector<std::string>> documents,
           const std::vector<std::string>& prefix, std::string_view token);

  // Registers a response for one fully rendered prompt.
  void AddRendered(std::string_view rendered_prompt, std::string_view token);
  void AddContextHash(std::string_view context_hash, std::string_view token);

  absl::StatusOr<Token> NextToken(
      const GenerationContext& context) const override;

  const Vocabulary& vocabulary() const override { return vocabulary_; }

  // Hex FNV-1a of `prompt.Render(context)`.
  static std::string ContextHash(const PromptTemplate& prompt,
                                 const GenerationContext& context);

 private:
  // (question, sorted doc ids or {"*"}, prefix surfaces)
  using Key = std::tuple<std::string, std::vector<std::string>,
                         std::vector<std::string>>;

  PromptTemplate prompt_;
  Vocabulary vocabulary_;
  TokenId fallback_;
  std::map<std::string, TokenId> by_hash_;
  std::map<Key, TokenId> by_key_;
};

}  // namespace dprag

#endif  // DPRAG_SCRIPTED_GENERATOR_H_
