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

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "dprag/generator.h"

namespace dprag {
namespace {

size_t CountWords(std::string_view text) {
  size_t words = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  return words;
}

}  // namespace

std::string PromptTemplate::Render(const GenerationContext& context) const {
  std::string out;
  out.reserve(text_.size() + context.question.size());
  size_t pos = 0;
  while (pos < text_.size()) {
    if (text_[pos] == '{') {
      const size_t close = text_.find('}', pos);
      if (close != std::string::npos) {
        const std::string_view name =
            std::string_view(text_).substr(pos + 1, close - pos - 1);
        if (name == "documents") {
          for (const Document& doc : context.documents) {
            out += doc.text;
            out += '\n';
          }
          pos = close + 1;
          continue;
        }
        if (name == "question") {
          out += context.question;
          pos = close + 1;
          continue;
        }
        if (name == "prefix") {
          for (const Token& token : context.prefix) {
            out += ' ';
            out += token.surface;
          }
          pos = close + 1;
          continue;
        }
      }
    }
    out += text_[pos++];
  }
  return out;
}

absl::StatusOr<size_t> DocumentsToDrop(const PromptTemplate& prompt,
                                       const GenerationContext& context,
                                       size_t window) {
  if (window == 0) return 0;
  GenerationContext trimmed = context;
  for (size_t dropped = 0; dropped <= context.documents.size(); ++dropped) {
    trimmed.documents = context.documents.subspan(dropped);
    if (CountWords(prompt.Render(trimmed)) <= window) return dropped;
  }
  return absl::ResourceExhaustedError(absl::StrFormat(
      "Context overflow: prompt without documents exceeds the %d-word window",
      window));
}

}  // namespace dprag
