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

// File formats: JSONL corpora, question sets and MIA sets, plain-text
// training data and the ROC CSV.

#ifndef DPRAG_DATA_IO_H_
#define DPRAG_DATA_IO_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dprag/document.h"
#include "dprag/evaluation.h"

namespace dprag {

// NotFound if the file cannot be opened.
absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path);
absl::Status WriteFile(const std::filesystem::path& path,
                       std::string_view contents);

// One object per line with doc_id, text and optional owner_id (defaults to
// doc_id). Blank lines are skipped. InvalidArgument names the bad line.
absl::StatusOr<std::vector<Document>> LoadCorpus(
    const std::filesystem::path& path);

// One object per line with question and answers (array of strings).
absl::StatusOr<std::vector<QaExample>> LoadQuestions(
    const std::filesystem::path& path);

// One object per line with doc_id, text and membership ("in" / "out", or a
// boolean). Each text is split at the "###" delimiter. With `expected` set,
// membership may be omitted and a differing value is an error.
absl::StatusOr<std::vector<MiaExample>> LoadMiaSet(
    const std::filesystem::path& path,
    std::optional<Membership> expected = std::nullopt);

// Training texts for the n-gram generator: a .jsonl file contributes each
// object's "text" field, any other file each non-blank line.
absl::StatusOr<std::vector<std::string>> LoadTrainingTexts(
    const std::filesystem::path& path);

// "fpr,tpr" header, one row per point.
std::string RocCsv(const RocCurve& curve);

}  // namespace dprag

#endif  // DPRAG_DATA_IO_H_
