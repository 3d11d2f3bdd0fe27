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

#include "dprag/accountant.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "dprag/status_macros.h"

namespace dprag {
namespace {

bool WithinTotal(double cost, double total) {
  return cost <= total * (1.0 + kBudgetRelativeSlack);
}

}  // namespace

std::string_view CompositionRuleName(CompositionRule rule) {
  switch (rule) {
    case CompositionRule::kSequential:
      return "sequential";
    case CompositionRule::kAdvanced:
      return "advanced";
  }
  return "unknown";
}

double AdvancedCompositionEpsilon(int64_t steps, double epsilon0,
                                  double delta_prime) {
  const double t = static_cast<double>(steps);
  return std::sqrt(2.0 * t * std::log(1.0 / delta_prime)) * epsilon0 +
         t * epsilon0 * std::expm1(epsilon0);
}

bool SequentialFits(int64_t steps, const PrivacyBudget& per_token,
                    const PrivacyBudget& total) {
  const double t = static_cast<double>(steps);
  return WithinTotal(t * per_token.epsilon, total.epsilon) &&
         WithinTotal(t * per_token.delta, total.delta);
}

bool AdvancedFits(int64_t steps, const PrivacyBudget& per_token,
                  const PrivacyBudget& total) {
  // The advanced rule needs delta' > 0 to be meaningful.
  if (total.delta <= 0.0) return false;
  const double delta_prime = total.delta / 2.0;
  const double t = static_cast<double>(steps);
  return WithinTotal(
             AdvancedCompositionEpsilon(steps, per_token.epsilon, delta_prime),
             total.epsilon) &&
         WithinTotal(t * per_token.delta, delta_prime);
}

int64_t SequentialMax(const PrivacyBudget& per_token,
                      const PrivacyBudget& total) {
  double bound = total.epsilon / per_token.epsilon;
  if (per_token.delta > 0.0) {
    bound = std::min(bound, total.delta / per_token.delta);
  }
  int64_t steps = static_cast<int64_t>(
      std::min(std::floor(bound), static_cast<double>(kMaxCompositionSteps)));
  // The floor can be off by one around exact multiples.
  while (steps < kMaxCompositionSteps &&
         SequentialFits(steps + 1, per_token, total)) {
    ++steps;
  }
  while (steps > 0 && !SequentialFits(steps, per_token, total)) --steps;
  return steps;
}

int64_t AdvancedMax(const PrivacyBudget& per_token,
                    const PrivacyBudget& total) {
  int64_t steps = 0;
  while (steps < kMaxCompositionSteps &&
         AdvancedFits(steps + 1, per_token, total)) {
    ++steps;
  }
  return steps;
}

absl::StatusOr<CompositionPlan> MaxCompositions(const PrivacyBudget& per_token,
                                                const PrivacyBudget& total) {
  RETURN_IF_ERROR(per_token.Validate());
  RETURN_IF_ERROR(total.Validate());
  const int64_t sequential = SequentialMax(per_token, total);
  const int64_t advanced = AdvancedMax(per_token, total);
  if (sequential == 0 && advanced == 0) {
    return absl::OutOfRangeError(absl::StrFormat(
        "Infeasible budget: per-token (%g, %g) does not fit once in total "
        "(%g, %g)",
        per_token.epsilon, per_token.delta, total.epsilon, total.delta));
  }
  CompositionPlan plan{per_token, total, sequential,
                       CompositionRule::kSequential};
  if (advanced > sequential) {
    plan.max_steps = advanced;
    plan.rule_used = CompositionRule::kAdvanced;
  }
  return plan;
}

absl::Status PrivacyLedger::Consume(int64_t step_index) {
  if (remaining_ == 0) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "Privacy budget exhausted at step %d after %d private releases",
        step_index, plan_.max_steps));
  }
  --remaining_;
  events_.push_back({step_index, EventKind::kPrivateVote});
  return absl::OkStatus();
}

void PrivacyLedger::RecordSparsePass(int64_t step_index) {
  events_.push_back({step_index, EventKind::kSparsePass});
}

}  // namespace dprag
