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

// Utility and empirical-privacy metrics: match accuracy, BLEU precision, the
// S2MIA membership score and ROC/AUC.

#ifndef DPRAG_EVALUATION_H_
#define DPRAG_EVALUATION_H_

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "dprag/document.h"

namespace dprag {

struct QaExample {
  std::string question;
  // Any of these counts as correct.
  std::vector<std::string> answers;
};

// Lowercases, removes ASCII punctuation and collapses whitespace.
std::string NormalizeAnswer(std::string_view text);

// 1 if the normalized prediction contains any normalized, non-empty answer.
int MatchAccuracy(std::string_view prediction,
                  std::span<const std::string> answers);

// Mean of the modified n-gram precisions for n = 1..min(4, |candidate|).
// Orders with no match use (0 + 1) / (total + 1). Empty candidate gives 0.
double BleuPrecision(std::string_view candidate, std::string_view reference);

enum class Membership { kIn, kOut };

inline constexpr std::string_view kMiaDelimiter = "###";

struct MiaExample {
  Document doc;
  std::string query_part;
  std::string ground_truth_answer;
  Membership membership = Membership::kOut;
};

// Splits doc.text at the first `delimiter` into query and answer halves.
// InvalidArgument if the delimiter is missing or either half is empty.
absl::StatusOr<MiaExample> MakeMiaExample(
    Document doc, Membership membership,
    std::string_view delimiter = kMiaDelimiter);

// The system under attack: question in, answer text out.
using AnswerFunction =
    std::function<absl::StatusOr<std::string>(std::string_view question)>;

// BLEU precision of the system's answer to the query half against the
// ground-truth half. Higher means more likely a member.
absl::StatusOr<double> S2MiaScore(const MiaExample& example,
                                  const AnswerFunction& system);

struct RocCurve {
  // (fpr, tpr) from (0, 0) to (1, 1).
  std::vector<std::pair<double, double>> points;
  double auc = 0.0;
};

// Sweeps every distinct score as a threshold, highest first; a sample is
// flagged when its score is >= the threshold. AUC by the trapezoid rule.
// InvalidArgument if either list is empty.
absl::StatusOr<RocCurve> RocAuc(std::span<const double> in_scores,
                                std::span<const double> out_scores);

}  // namespace dprag

#endif  // DPRAG_EVALUATION_H_
