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

#include "dprag/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "dprag/random.h"
#include "dprag/status_macros.h"

namespace dprag {
namespace {

absl::Status ValidateScale(double scale) {
  if (!std::isfinite(scale) || scale <= 0.0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "Noise scale must be finite and positive, got %g", scale));
  }
  return absl::OkStatus();
}

double Snap(double score) {
  return std::nearbyint(score / kNoisyScoreResolution) * kNoisyScoreResolution;
}

}  // namespace

absl::Status PrivacyBudget::Validate() const {
  if (!std::isfinite(epsilon) || epsilon <= 0.0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "Epsilon must be finite and positive, got %g", epsilon));
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("Delta must be in [0, 1), got %g", delta));
  }
  return absl::OkStatus();
}

absl::StatusOr<PrivacyBudget> PrivacyBudget::Create(double epsilon,
                                                    double delta) {
  PrivacyBudget budget{epsilon, delta};
  RETURN_IF_ERROR(budget.Validate());
  return budget;
}

TokenHistogram TokenHistogram::FromVotes(std::span<const TokenId> votes) {
  TokenHistogram histogram;
  for (TokenId vote : votes) histogram.AddVote(vote);
  return histogram;
}

void TokenHistogram::AddVote(TokenId token) {
  ++counts_[token];
  ++voter_count_;
}

int64_t TokenHistogram::count(TokenId token) const {
  auto it = counts_.find(token);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::pair<TokenId, int64_t>> TokenHistogram::Ranked() const {
  std::vector<std::pair<TokenId, int64_t>> ranked(counts_.begin(),
                                                  counts_.end());
  std::stable_sort(
      ranked.begin(), ranked.end(),
      [](const auto& a, const auto& b) { return a.second > b.second; });
  return ranked;
}

TokenId TokenHistogram::Plurality() const {
  TokenId best = kEosId;
  int64_t best_count = -1;
  for (const auto& [token, count] : counts_) {
    if (count > best_count) {
      best = token;
      best_count = count;
    }
  }
  return best;
}

double LaplaceFromUniform(double scale, double u) {
  // Branching keeps full precision in both tails.
  if (u < 0.5) return scale * std::log(2.0 * u);
  return -scale * std::log(2.0 * (1.0 - u));
}

double GumbelFromUniform(double scale, double u) {
  return -scale * std::log(-std::log(u));
}

absl::StatusOr<double> SampleLaplace(double scale, Rng& rng) {
  RETURN_IF_ERROR(ValidateScale(scale));
  return LaplaceFromUniform(scale, rng.NextOpenUniform());
}

absl::StatusOr<double> SampleGumbel(double scale, Rng& rng) {
  RETURN_IF_ERROR(ValidateScale(scale));
  return GumbelFromUniform(scale, rng.NextOpenUniform());
}

absl::Status LimitedDomainConfig::Validate() const {
  RETURN_IF_ERROR(budget.Validate());
  if (budget.delta <= 0.0) {
    return absl::InvalidArgumentError("LimitedDomain requires delta > 0");
  }
  if (k_bar < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("k_bar must be at least 1, got %d", k_bar));
  }
  if (vocabulary_size < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "Vocabulary size must be at least 1, got %d", vocabulary_size));
  }
  return absl::OkStatus();
}

int64_t LimitedDomainCutoff(const TokenHistogram& histogram,
                            const LimitedDomainConfig& config) {
  const auto ranked = histogram.Ranked();
  const int64_t next_count =
      static_cast<int64_t>(ranked.size()) > config.k_bar
          ? ranked[static_cast<size_t>(config.k_bar)].second
          : 0;
  const int64_t outside =
      std::max<int64_t>(config.vocabulary_size - config.k_bar, 1);
  const double entrants = static_cast<double>(std::min(config.k_bar, outside));
  const double margin = std::ceil(
      2.0 * std::log(entrants / config.budget.delta) / config.budget.epsilon);
  return next_count + 1 + static_cast<int64_t>(margin);
}

absl::StatusOr<std::optional<TokenId>> LimitedDomainTop1(
    const TokenHistogram& histogram, const LimitedDomainConfig& config,
    Rng& rng) {
  if (histogram.empty()) {
    return absl::InvalidArgumentError(
        "LimitedDomain requires a histogram with at least one vote");
  }
  RETURN_IF_ERROR(config.Validate());

  auto ranked = histogram.Ranked();
  if (static_cast<int64_t>(ranked.size()) > config.k_bar) {
    ranked.resize(static_cast<size_t>(config.k_bar));
  }
  // Noise is drawn in ascending token-id order, then for the bottom.
  std::sort(ranked.begin(), ranked.end());

  const double scale = 2.0 / config.budget.epsilon;
  std::optional<TokenId> winner;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [token, count] : ranked) {
    ASSIGN_OR_RETURN(const double noise, SampleGumbel(scale, rng));
    const double score = Snap(static_cast<double>(count) + noise);
    if (score > best) {
      best = score;
      winner = token;
    }
  }
  const int64_t cutoff = LimitedDomainCutoff(histogram, config);
  ASSIGN_OR_RETURN(const double bottom_noise, SampleGumbel(scale, rng));
  if (Snap(static_cast<double>(cutoff) + bottom_noise) > best) {
    return std::optional<TokenId>();
  }
  return winner;
}

absl::StatusOr<NoisyThreshold> NoisyThreshold::Create(double tau,
                                                      double epsilon_lap,
                                                      Rng& rng) {
  if (!std::isfinite(epsilon_lap) || epsilon_lap <= 0.0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "Threshold epsilon must be finite and positive, got %g", epsilon_lap));
  }
  if (!std::isfinite(tau)) {
    return absl::InvalidArgumentError("Threshold must be finite");
  }
  NoisyThreshold state(tau, epsilon_lap);
  state.Reinitialize(rng);
  return state;
}

void NoisyThreshold::Reinitialize(Rng& rng) {
  tau_hat_ =
      tau_ + LaplaceFromUniform(2.0 / epsilon_lap_, rng.NextOpenUniform());
  consumed_ = false;
}

absl::StatusOr<ThresholdVerdict> NoisyThreshold::Query(int64_t count,
                                                       Rng& rng) {
  if (consumed_) {
    return absl::FailedPreconditionError(
        "Threshold state already reported Below; reinitialize before the "
        "next query");
  }
  if (count < 0) {
    return absl::InvalidArgumentError("Query count must be non-negative");
  }
  const double noise =
      LaplaceFromUniform(4.0 / epsilon_lap_, rng.NextOpenUniform());
  if (static_cast<double>(count) + noise <= tau_hat_) {
    consumed_ = true;
    return ThresholdVerdict::kBelow;
  }
  return ThresholdVerdict::kAbove;
}

}  // namespace dprag
