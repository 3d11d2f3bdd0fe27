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

#ifndef DPRAG_TOKEN_H_
#define DPRAG_TOKEN_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace dprag {

using TokenId = int32_t;

// Id 0 is reserved for end-of-sequence in every vocabulary.
inline constexpr TokenId kEosId = 0;
inline constexpr std::string_view kEosSurface = "<eos>";

struct Token {
  TokenId id = kEosId;
  std::string surface{kEosSurface};

  bool is_eos() const { return id == kEosId; }
  friend bool operator==(const Token&, const Token&) = default;
};

}  // namespace dprag

#endif  // DPRAG_TOKEN_H_
