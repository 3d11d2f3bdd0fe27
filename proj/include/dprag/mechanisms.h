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

// Differential-privacy primitives used by the generation loops: Laplace and
// Gumbel samplers, the LimitedDomain private arg-max over a token histogram,
// and the AboveThreshold (sparse vector) gate.

#ifndef DPRAG_MECHANISMS_H_
#define DPRAG_MECHANISMS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dprag/random.h"
#include "dprag/token.h"

namespace dprag {

// An (epsilon, delta) pair. epsilon is in nats.
struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 0.0;

  // OK iff epsilon is finite and positive and delta is in [0, 1).
  absl::Status Validate() const;

  static absl::StatusOr<PrivacyBudget> Create(double epsilon, double delta);

  friend bool operator==(const PrivacyBudget&, const PrivacyBudget&) = default;
};

// Vote counts over token ids for one generation step.
//
// Moving one voter's vote from token a to token b changes exactly two bins by
// one each; the mechanisms below are calibrated to that sensitivity.
class TokenHistogram {
 public:
  TokenHistogram() = default;

  static TokenHistogram FromVotes(std::span<const TokenId> votes);

  void AddVote(TokenId token);

  int64_t count(TokenId token) const;
  int64_t voter_count() const { return voter_count_; }
  bool empty() const { return voter_count_ == 0; }

  // Bins with non-zero count, keyed by ascending token id.
  const std::map<TokenId, int64_t>& counts() const { return counts_; }

  // Non-zero bins ordered by descending count, ties by ascending token id.
  std::vector<std::pair<TokenId, int64_t>> Ranked() const;

  // Highest-count token, ties by ascending token id. Requires !empty().
  TokenId Plurality() const;

  friend bool operator==(const TokenHistogram&,
                         const TokenHistogram&) = default;

 private:
  std::map<TokenId, int64_t> counts_;
  int64_t voter_count_ = 0;
};

// Inverse-CDF transforms from a uniform draw u in (0, 1). Exposed so that
// tests can pin specific quantiles.
double LaplaceFromUniform(double scale, double u);
double GumbelFromUniform(double scale, double u);

// Laplace(0, scale) draw. InvalidArgument if scale is not positive.
absl::StatusOr<double> SampleLaplace(double scale, Rng& rng);

// Gumbel(0, scale) draw. InvalidArgument if scale is not positive.
absl::StatusOr<double> SampleGumbel(double scale, Rng& rng);

struct LimitedDomainConfig {
  // Number of top bins kept as candidates.
  int64_t k_bar = 1;
  // Must have delta > 0.
  PrivacyBudget budget;
  // Size of the token universe the histogram is drawn from.
  int64_t vocabulary_size = 1;

  absl::Status Validate() const;
};

// Resolution of noisy scores in LimitedDomainTop1. Scores are rounded to this
// grid before the arg-max so that exact count ties resolve by token id once
// the noise is negligible.
inline constexpr double kNoisyScoreResolution = 0x1.0p-12;

// The data-dependent count of the synthetic "bottom" candidate:
//   h_(k_bar + 1) + 1 + ceil(2 ln(min(k_bar, max(|V| - k_bar, 1)) / delta) /
//   eps)
// where h_(k_bar + 1) is the (k_bar + 1)-th largest count (0 if absent).
int64_t LimitedDomainCutoff(const TokenHistogram& histogram,
                            const LimitedDomainConfig& config);

// Private top-1 selection restricted to the k_bar largest bins.
//
// Each candidate count and the bottom cutoff receive independent
// Gumbel(2 / epsilon) noise; the factor 2 accounts for the two bins a single
// voter moves. Returns the winning token, or std::nullopt when the bottom
// candidate wins (callers treat that as end of sequence). The result is
// (epsilon, delta)-DP with respect to one voter's vote.
absl::StatusOr<std::optional<TokenId>> LimitedDomainTop1(
    const TokenHistogram& histogram, const LimitedDomainConfig& config,
    Rng& rng);

enum class ThresholdVerdict { kAbove, kBelow };

// AboveThreshold gate as used by the sparse voting loop: a query reports
// kBelow when count + Lap(4 / epsilon) <= tau_hat. A kBelow verdict consumes
// the state; it has to be reinitialized (fresh tau_hat) before the next query.
class NoisyThreshold {
 public:
  // tau_hat = tau + Lap(2 / epsilon_lap).
  static absl::StatusOr<NoisyThreshold> Create(double tau, double epsilon_lap,
                                               Rng& rng);

  // FailedPrecondition if the state was consumed by a previous kBelow.
  absl::StatusOr<ThresholdVerdict> Query(int64_t count, Rng& rng);

  // Draws a fresh tau_hat and clears the consumed flag.
  void Reinitialize(Rng& rng);

  double tau() const { return tau_; }
  double tau_hat() const { return tau_hat_; }
  double epsilon_lap() const { return epsilon_lap_; }
  bool consumed() const { return consumed_; }

 private:
  NoisyThreshold(double tau, double epsilon_lap)
      : tau_(tau), epsilon_lap_(epsilon_lap) {}

  double tau_;
  double epsilon_lap_;
  double tau_hat_ = 0.0;
  bool consumed_ = false;
};

}  // namespace dprag

#endif  // DPRAG_MECHANISMS_H_
