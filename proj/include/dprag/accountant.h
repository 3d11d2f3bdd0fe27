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

// Converts a per-token and a total privacy budget into the number of private
// releases the total affords, and tracks consumption during a run.

#ifndef DPRAG_ACCOUNTANT_H_
#define DPRAG_ACCOUNTANT_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dprag/mechanisms.h"

namespace dprag {

// Hard cap on the number of compositions either rule will report.
inline constexpr int64_t kMaxCompositionSteps = 1'000'000;

// Relative slack when comparing a composed cost against the total, so that
// e.g. 10 * 1e-5 is accepted against a total of 1e-4 despite rounding.
inline constexpr double kBudgetRelativeSlack = 1e-12;

enum class CompositionRule { kSequential, kAdvanced };

std::string_view CompositionRuleName(CompositionRule rule);

// Cost of `steps` compositions of (epsilon0, delta0) under the advanced rule
// with delta' = delta_total / 2:
//   sqrt(2 T ln(1 / delta')) epsilon0 + T epsilon0 (e^epsilon0 - 1).
double AdvancedCompositionEpsilon(int64_t steps, double epsilon0,
                                  double delta_prime);

// Whether `steps` compositions fit in `total` under each rule.
bool SequentialFits(int64_t steps, const PrivacyBudget& per_token,
                    const PrivacyBudget& total);
bool AdvancedFits(int64_t steps, const PrivacyBudget& per_token,
                  const PrivacyBudget& total);

// Largest T with T eps0 <= eps_total and T delta0 <= delta_total; 0 when even
// one step does not fit.
int64_t SequentialMax(const PrivacyBudget& per_token,
                      const PrivacyBudget& total);

// Largest T satisfying the advanced bound and T delta0 <= delta_total / 2,
// found by a linear scan from T = 1.
int64_t AdvancedMax(const PrivacyBudget& per_token, const PrivacyBudget& total);

struct CompositionPlan {
  PrivacyBudget per_token;
  PrivacyBudget total;
  int64_t max_steps = 0;
  CompositionRule rule_used = CompositionRule::kSequential;
};

// Takes the larger of the two rules (ties go to sequential). OutOfRange when
// neither rule affords a single step; InvalidArgument for malformed budgets.
absl::StatusOr<CompositionPlan> MaxCompositions(const PrivacyBudget& per_token,
                                                const PrivacyBudget& total);

// Run-time counter of remaining private releases.
class PrivacyLedger {
 public:
  enum class EventKind { kPrivateVote, kSparsePass };
  struct Event {
    int64_t step_index;
    EventKind kind;
  };

  explicit PrivacyLedger(const CompositionPlan& plan)
      : plan_(plan), remaining_(plan.max_steps) {}

  // Records a private release. ResourceExhausted when remaining() == 0.
  absl::Status Consume(int64_t step_index);

  // Records a step answered without spending budget.
  void RecordSparsePass(int64_t step_index);

  const CompositionPlan& plan() const { return plan_; }
  int64_t remaining() const { return remaining_; }
  int64_t private_votes() const { return plan_.max_steps - remaining_; }
  const std::vector<Event>& events() const { return events_; }

 private:
  CompositionPlan plan_;
  int64_t remaining_;
  std::vector<Event> events_;
};

}  // namespace dprag

#endif  // DPRAG_ACCOUNTANT_H_
