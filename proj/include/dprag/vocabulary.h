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

#ifndef DPRAG_VOCABULARY_H_
#define DPRAG_VOCABULARY_H_

#include <cstddef>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dprag/token.h"

namespace dprag {

// Bidirectional map between token surfaces and dense ids. Id 0 is always
// <eos>; other ids are assigned in order of first insertion. Safe for
// concurrent use.
class Vocabulary {
 public:
  Vocabulary();

  Vocabulary(const Vocabulary&) = delete;
  Vocabulary& operator=(const Vocabulary&) = delete;

  // Returns the id for `surface`, inserting it if new.
  TokenId Intern(std::string_view surface);

  std::optional<TokenId> Find(std::string_view surface) const;

  // Empty string for unknown ids.
  std::string Surface(TokenId id) const;

  Token MakeToken(TokenId id) const { return Token{id, Surface(id)}; }

  size_t size() const;

  // Surfaces with id >= first_id, in id order.
  std::vector<std::string> SurfacesFrom(TokenId first_id) const;

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> surfaces_;
  std::unordered_map<std::string, TokenId> ids_;
};

// Word-level tokenizer shared by the generators: lowercases ASCII, splits on
// whitespace and strips surrounding punctuation (.,!?;:"'()) from each piece.
// Pieces made only of punctuation, such as "###", are kept as they are.
std::vector<std::string> SplitWords(std::string_view text);

}  // namespace dprag

#endif  // DPRAG_VOCABULARY_H_
