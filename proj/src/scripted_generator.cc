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

#include "dprag/scripted_generator.h"

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "dprag/random.h"
#include "dprag/string_compat.h"
#include "json.hpp"

namespace dprag {
namespace {

std::vector<std::string> PrefixSurfaces(std::span<const Token> prefix) {
  std::vector<std::string> out;
  out.reserve(prefix.size());
  for (const Token& token : prefix) out.push_back(token.surface);
  return out;
}

}  // namespace

ScriptedGenerator::ScriptedGenerator(std::string_view fallback,
                                     PromptTemplate prompt)
    : prompt_(std::move(prompt)), fallback_(vocabulary_.Intern(fallback)) {}

void ScriptedGenerator::Add(std::string_view question,
                            std::optional<std::vector<std::string>> documents,
                            const std::vector<std::string>& prefix,
                            std::string_view token) {
  std::vector<std::string> docs =
      documents.has_value() ? *std::move(documents)
                            : std::vector<std::string>{std::string(kWildcard)};
  std::sort(docs.begin(), docs.end());
  for (const std::string& word : prefix) vocabulary_.Intern(word);
  by_key_[Key(std::string(question), std::move(docs), prefix)] =
      vocabulary_.Intern(token);
}

void ScriptedGenerator::AddRendered(std::string_view rendered_prompt,
                                    std::string_view token) {
  by_hash_[absl::StrFormat("%016x", Fnv1a64(rendered_prompt))] =
      vocabulary_.Intern(token);
}

void ScriptedGenerator::AddContextHash(std::string_view context_hash,
                                       std::string_view token) {
  by_hash_[std::string(context_hash)] = vocabulary_.Intern(token);
}

std::string ScriptedGenerator::ContextHash(const PromptTemplate& prompt,
                                           const GenerationContext& context) {
  return absl::StrFormat("%016x", Fnv1a64(prompt.Render(context)));
}

absl::StatusOr<Token> ScriptedGenerator::NextToken(
    const GenerationContext& context) const {
  if (!by_hash_.empty()) {
    auto it = by_hash_.find(ContextHash(prompt_, context));
    if (it != by_hash_.end()) return vocabulary_.MakeToken(it->second);
  }
  std::vector<std::string> docs;
  for (const Document& doc : context.documents) docs.push_back(doc.doc_id);
  std::sort(docs.begin(), docs.end());
  const std::vector<std::string> prefix = PrefixSurfaces(context.prefix);
  const std::vector<std::string> any{std::string(kWildcard)};

  for (const std::string& question :
       {std::string(context.question), std::string(kWildcard)}) {
    auto it = by_key_.find(Key(question, docs, prefix));
    if (it != by_key_.end()) return vocabulary_.MakeToken(it->second);
    if (!docs.empty()) {
      it = by_key_.find(Key(question, any, prefix));
      if (it != by_key_.end()) return vocabulary_.MakeToken(it->second);
    }
  }
  return vocabulary_.MakeToken(fallback_);
}

absl::StatusOr<std::unique_ptr<ScriptedGenerator>> ScriptedGenerator::FromJson(
    std::string_view json_text) {
  const nlohmann::json table =
      nlohmann::json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (table.is_discarded() || !table.is_object()) {
    return absl::InvalidArgumentError("Scripted table is not a JSON object");
  }
  const std::string fallback =
      table.value("fallback", std::string(kEosSurface));
  auto generator = std::make_unique<ScriptedGenerator>(fallback);
  if (!table.contains("entries")) return generator;
  if (!table["entries"].is_array()) {
    return absl::InvalidArgumentError(
        "Scripted table 'entries' must be a list");
  }
  size_t index = 0;
  for (const nlohmann::json& entry : table["entries"]) {
    auto bad = [&](std::string_view why) {
      return absl::InvalidArgumentError(
          absl::StrFormat("Scripted table entry %d: %s", index, ToAbsl(why)));
    };
    if (!entry.is_object() || !entry.contains("token") ||
        !entry["token"].is_string()) {
      return bad("missing string field 'token'");
    }
    const std::string token = entry["token"].get<std::string>();
    if (entry.contains("context_hash")) {
      if (!entry["context_hash"].is_string()) {
        return bad("'context_hash' must be a string");
      }
      generator->AddContextHash(entry["context_hash"].get<std::string>(),
                                token);
    } else {
      if (!entry.contains("question") || !entry["question"].is_string()) {
        return bad("missing string field 'question'");
      }
      std::optional<std::vector<std::string>> documents;
      const nlohmann::json docs = entry.value("documents", nlohmann::json());
      if (docs.is_array()) {
        documents.emplace();
        for (const auto& doc : docs) {
          if (!doc.is_string()) return bad("document ids must be strings");
          documents->push_back(doc.get<std::string>());
        }
      } else if (!(docs.is_string() && docs.get<std::string>() == kWildcard)) {
        return bad("'documents' must be a list of ids or \"*\"");
      }
      std::vector<std::string> prefix;
      const nlohmann::json prefix_json =
          entry.value("prefix", nlohmann::json::array());
      if (!prefix_json.is_array()) return bad("'prefix' must be a list");
      for (const auto& word : prefix_json) {
        if (!word.is_string()) return bad("prefix tokens must be strings");
        prefix.push_back(word.get<std::string>());
      }
      generator->Add(entry["question"].get<std::string>(), std::move(documents),
                     prefix, token);
    }
    ++index;
  }
  return generator;
}

}  // namespace dprag
