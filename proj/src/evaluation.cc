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

#include "dprag/evaluation.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "dprag/string_compat.h"
#include "dprag/vocabulary.h"

namespace dprag {
namespace {

std::string_view Trim(std::string_view text) {
  while (!text.empty() &&
         std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() &&
         std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  return text;
}

using NgramCounts = std::map<std::vector<std::string>, int>;

NgramCounts CountNgrams(const std::vector<std::string>& words, size_t n) {
  NgramCounts counts;
  for (size_t i = 0; i + n <= words.size(); ++i) {
    ++counts[std::vector<std::string>(
        words.begin() + static_cast<ptrdiff_t>(i),
        words.begin() + static_cast<ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

std::string NormalizeAnswer(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::ispunct(u)) continue;
    if (std::isspace(u)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(u));
  }
  return out;
}

int MatchAccuracy(std::string_view prediction,
                  std::span<const std::string> answers) {
  const std::string normalized = NormalizeAnswer(prediction);
  for (const std::string& answer : answers) {
    const std::string target = NormalizeAnswer(answer);
    if (!target.empty() && normalized.find(target) != std::string::npos) {
      return 1;
    }
  }
  return 0;
}

double BleuPrecision(std::string_view candidate, std::string_view reference) {
  const std::vector<std::string> cand = SplitWords(candidate);
  if (cand.empty()) return 0.0;
  const std::vector<std::string> ref = SplitWords(reference);
  const size_t max_order = std::min<size_t>(4, cand.size());
  double sum = 0.0;
  for (size_t n = 1; n <= max_order; ++n) {
    const NgramCounts cand_counts = CountNgrams(cand, n);
    const NgramCounts ref_counts = CountNgrams(ref, n);
    int matches = 0;
    for (const auto& [gram, count] : cand_counts) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matches += std::min(count, it->second);
    }
    const double total = static_cast<double>(cand.size() - n + 1);
    sum += matches > 0 ? matches / total : 1.0 / (total + 1.0);
  }
  return sum / static_cast<double>(max_order);
}

absl::StatusOr<MiaExample> MakeMiaExample(Document doc, Membership membership,
                                          std::string_view delimiter) {
  const size_t split = doc.text.find(delimiter);
  if (split == std::string::npos) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "Document '%s' has no '%s' delimiter", doc.doc_id, ToAbsl(delimiter)));
  }
  MiaExample example;
  example.query_part =
      std::string(Trim(std::string_view(doc.text).substr(0, split)));
  example.ground_truth_answer = std::string(
      Trim(std::string_view(doc.text).substr(split + delimiter.size())));
  if (example.query_part.empty() || example.ground_truth_answer.empty()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "Document '%s' has an empty query or answer half", doc.doc_id));
  }
  example.doc = std::move(doc);
  example.membership = membership;
  return example;
}

absl::StatusOr<double> S2MiaScore(const MiaExample& example,
                                  const AnswerFunction& system) {
  absl::StatusOr<std::string> answer = system(example.query_part);
  if (!answer.ok()) {
    return absl::Status(
        answer.status().code(),
        absl::StrFormat("MIA example '%s': %s", example.doc.doc_id,
                        answer.status().message()));
  }
  return BleuPrecision(*answer, example.ground_truth_answer);
}

absl::StatusOr<RocCurve> RocAuc(std::span<const double> in_scores,
                                std::span<const double> out_scores) {
  if (in_scores.empty() || out_scores.empty()) {
    return absl::InvalidArgumentError(
        "ROC needs at least one in-set and one out-set score");
  }
  std::vector<double> thresholds(in_scores.begin(), in_scores.end());
  thresholds.insert(thresholds.end(), out_scores.begin(), out_scores.end());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  std::vector<double> in(in_scores.begin(), in_scores.end());
  std::vector<double> out(out_scores.begin(), out_scores.end());
  std::sort(in.begin(), in.end(), std::greater<>());
  std::sort(out.begin(), out.end(), std::greater<>());

  RocCurve curve;
  curve.points.emplace_back(0.0, 0.0);
  size_t in_flagged = 0;
  size_t out_flagged = 0;
  for (double threshold : thresholds) {
    while (in_flagged < in.size() && in[in_flagged] >= threshold) ++in_flagged;
    while (out_flagged < out.size() && out[out_flagged] >= threshold) {
      ++out_flagged;
    }
    curve.points.emplace_back(
        static_cast<double>(out_flagged) / static_cast<double>(out.size()),
        static_cast<double>(in_flagged) / static_cast<double>(in.size()));
  }
  for (size_t i = 1; i < curve.points.size(); ++i) {
    const auto& [x0, y0] = curve.points[i - 1];
    const auto& [x1, y1] = curve.points[i];
    curve.auc += (x1 - x0) * (y0 + y1) / 2.0;
  }
  return curve;
}

}  // namespace dprag
