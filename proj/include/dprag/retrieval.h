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

// Retrieval of the m * k most relevant documents and their uniformly random
// partition into m disjoint voter subsets.

#ifndef DPRAG_RETRIEVAL_H_
#define DPRAG_RETRIEVAL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "dprag/document.h"
#include "dprag/random.h"

namespace dprag {

struct RetrievalResult {
  // Most relevant first; no duplicates.
  std::vector<std::string> ranked;
  // Non-increasing, parallel to `ranked`.
  std::vector<double> scores;
};

// Deterministic retriever interface. Implementations are immutable after
// construction and safe for concurrent use.
class Retriever {
 public:
  virtual ~Retriever() = default;

  // Exactly `count` documents. FailedPrecondition (insufficient corpus) if
  // the corpus holds fewer than `count` documents.
  virtual absl::StatusOr<RetrievalResult> Retrieve(std::string_view question,
                                                   size_t count) const = 0;

  virtual const Document* Find(std::string_view doc_id) const = 0;
  virtual size_t size() const = 0;
};

// Lowercased alphanumeric runs.
std::vector<std::string> RetrievalTerms(std::string_view text);

// TF-IDF cosine retriever. Term weight is raw count times
// idf = ln(N / (1 + df)) + 1. Ties in score go to the smaller doc_id.
class TfIdfIndex : public Retriever {
 public:
  // (term index, weight), sorted by term index.
  using SparseVector = std::vector<std::pair<int32_t, double>>;

  // InvalidArgument on an empty corpus or duplicate doc ids.
  static absl::StatusOr<TfIdfIndex> Build(std::vector<Document> corpus);

  absl::StatusOr<RetrievalResult> Retrieve(std::string_view question,
                                           size_t count) const override;
  const Document* Find(std::string_view doc_id) const override;
  size_t size() const override { return documents_.size(); }

  std::span<const Document> documents() const { return documents_; }
  const SparseVector& vector(size_t index) const { return vectors_[index]; }

  // Terms absent from the index are dropped.
  SparseVector Vectorize(std::string_view text) const;

  // 0 for unknown terms.
  double Idf(std::string_view term) const;

  static double Cosine(const SparseVector& a, const SparseVector& b);

 private:
  TfIdfIndex() = default;

  std::vector<Document> documents_;
  std::unordered_map<std::string, size_t> by_id_;
  std::unordered_map<std::string, int32_t> terms_;
  std::vector<double> idf_;
  std::vector<SparseVector> vectors_;
};

// m subsets of k documents each, in voter order.
struct VoterPartition {
  std::vector<std::vector<std::string>> subsets;
};

// Fisher-Yates shuffle of `result.ranked` followed by slicing consecutive
// k-blocks. InvalidArgument unless ranked.size() == m * k.
absl::StatusOr<VoterPartition> Partition(const RetrievalResult& result, int m,
                                         int k, Rng& rng);

}  // namespace dprag

#endif  // DPRAG_RETRIEVAL_H_
