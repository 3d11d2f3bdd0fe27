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

#include "dprag/data_io.h"

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "dprag/status_macros.h"
#include "dprag/string_compat.h"
#include "json.hpp"

namespace dprag {
namespace {

using Json = nlohmann::json;

absl::Status LineError(const std::filesystem::path& path, size_t line,
                       absl::string_view message) {
  return absl::InvalidArgumentError(
      absl::StrFormat("%s:%d: %s", path.string(), line, message));
}

// Calls fn(object, line_number) for each non-blank line.
absl::Status ForEachJsonLine(
    const std::filesystem::path& path,
    const std::function<absl::Status(const Json&, size_t)>& fn) {
  ASSIGN_OR_RETURN(std::string contents, ReadFile(path));
  size_t line_number = 0;
  for (absl::string_view line : absl::StrSplit(contents, '\n')) {
    ++line_number;
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    Json object = Json::parse(ToStd(line), nullptr,
                              /*allow_exceptions=*/false);
    if (object.is_discarded() || !object.is_object()) {
      return LineError(path, line_number, "not a JSON object");
    }
    RETURN_IF_ERROR(fn(object, line_number));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::string> StringField(const Json& object,
                                        std::string_view name) {
  auto it = object.find(std::string(name));
  if (it == object.end() || !it->is_string()) {
    return absl::InvalidArgumentError(
        absl::StrCat("missing string field '", ToAbsl(name), "'"));
  }
  return it->get<std::string>();
}

}  // namespace

absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("Cannot open '", path.string(), "'"));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteFile(const std::filesystem::path& path,
                       std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code error;
    std::filesystem::create_directories(path.parent_path(), error);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) {
    return absl::InternalError(
        absl::StrCat("Cannot write '", path.string(), "'"));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<Document>> LoadCorpus(
    const std::filesystem::path& path) {
  std::vector<Document> corpus;
  RETURN_IF_ERROR(ForEachJsonLine(
      path, [&](const Json& object, size_t line) -> absl::Status {
        absl::StatusOr<std::string> doc_id = StringField(object, "doc_id");
        absl::StatusOr<std::string> text = StringField(object, "text");
        if (!doc_id.ok())
          return LineError(path, line, doc_id.status().message());
        if (!text.ok()) return LineError(path, line, text.status().message());
        std::string owner = *doc_id;
        if (object.contains("owner_id")) {
          absl::StatusOr<std::string> value = StringField(object, "owner_id");
          if (!value.ok())
            return LineError(path, line, value.status().message());
          owner = *std::move(value);
        }
        corpus.push_back(
            Document{*std::move(doc_id), *std::move(text), std::move(owner)});
        return absl::OkStatus();
      }));
  return corpus;
}

absl::StatusOr<std::vector<QaExample>> LoadQuestions(
    const std::filesystem::path& path) {
  std::vector<QaExample> questions;
  RETURN_IF_ERROR(ForEachJsonLine(
      path, [&](const Json& object, size_t line) -> absl::Status {
        absl::StatusOr<std::string> question = StringField(object, "question");
        if (!question.ok()) {
          return LineError(path, line, question.status().message());
        }
        auto answers = object.find("answers");
        if (answers == object.end() || !answers->is_array() ||
            answers->empty()) {
          return LineError(path, line, "'answers' must be a non-empty array");
        }
        QaExample example{*std::move(question), {}};
        for (const Json& answer : *answers) {
          if (!answer.is_string()) {
            return LineError(path, line, "answers must be strings");
          }
          example.answers.push_back(answer.get<std::string>());
        }
        questions.push_back(std::move(example));
        return absl::OkStatus();
      }));
  return questions;
}

absl::StatusOr<std::vector<MiaExample>> LoadMiaSet(
    const std::filesystem::path& path, std::optional<Membership> expected) {
  std::vector<MiaExample> examples;
  RETURN_IF_ERROR(ForEachJsonLine(
      path, [&](const Json& object, size_t line) -> absl::Status {
        absl::StatusOr<std::string> doc_id = StringField(object, "doc_id");
        absl::StatusOr<std::string> text = StringField(object, "text");
        if (!doc_id.ok())
          return LineError(path, line, doc_id.status().message());
        if (!text.ok()) return LineError(path, line, text.status().message());
        auto field = object.find("membership");
        Membership membership;
        if (field != object.end() && field->is_boolean()) {
          membership = field->get<bool>() ? Membership::kIn : Membership::kOut;
        } else if (field != object.end() && *field == "in") {
          membership = Membership::kIn;
        } else if (field != object.end() && *field == "out") {
          membership = Membership::kOut;
        } else if (field == object.end() && expected.has_value()) {
          membership = *expected;
        } else {
          return LineError(path, line,
                           "'membership' must be \"in\", \"out\" or a boolean");
        }
        if (expected.has_value() && membership != *expected) {
          return LineError(path, line, "membership contradicts the set role");
        }
        std::string owner = *doc_id;
        absl::StatusOr<MiaExample> example = MakeMiaExample(
            Document{*std::move(doc_id), *std::move(text), std::move(owner)},
            membership);
        if (!example.ok()) {
          return LineError(path, line, example.status().message());
        }
        examples.push_back(*std::move(example));
        return absl::OkStatus();
      }));
  return examples;
}

absl::StatusOr<std::vector<std::string>> LoadTrainingTexts(
    const std::filesystem::path& path) {
  std::vector<std::string> texts;
  if (path.extension() == ".jsonl") {
    RETURN_IF_ERROR(ForEachJsonLine(
        path, [&](const Json& object, size_t line) -> absl::Status {
          absl::StatusOr<std::string> text = StringField(object, "text");
          if (!text.ok()) return LineError(path, line, text.status().message());
          texts.push_back(*std::move(text));
          return absl::OkStatus();
        }));
    return texts;
  }
  ASSIGN_OR_RETURN(std::string contents, ReadFile(path));
  for (absl::string_view line : absl::StrSplit(contents, '\n')) {
    line = absl::StripAsciiWhitespace(line);
    if (!line.empty()) texts.emplace_back(line);
  }
  return texts;
}

std::string RocCsv(const RocCurve& curve) {
  std::string csv = "fpr,tpr\n";
  for (const auto& [fpr, tpr] : curve.points) {
    absl::StrAppendFormat(&csv, "%.6f,%.6f\n", fpr, tpr);
  }
  return csv;
}

}  // namespace dprag
