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

#include "dprag/retrieval.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"

namespace dprag {

std::vector<std::string> RetrievalTerms(std::string_view text) {
  std::vector<std::string> terms;
  std::string current;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || u >= 0x80) {
      current += static_cast<char>(std::tolower(u));
    } else if (!current.empty()) {
      terms.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) terms.push_back(std::move(current));
  return terms;
}

absl::StatusOr<TfIdfIndex> TfIdfIndex::Build(std::vector<Document> corpus) {
  if (corpus.empty()) {
    return absl::InvalidArgumentError("Cannot index an empty corpus");
  }
  TfIdfIndex index;
  std::vector<std::map<int32_t, double>> term_counts(corpus.size());
  std::vector<int64_t> document_frequency;
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (!index.by_id_.emplace(corpus[i].doc_id, i).second) {
      return absl::InvalidArgumentError(
          absl::StrFormat("Duplicate doc_id '%s'", corpus[i].doc_id));
    }
    for (std::string& term : RetrievalTerms(corpus[i].text)) {
      auto [it, inserted] = index.terms_.emplace(
          std::move(term), static_cast<int32_t>(index.terms_.size()));
      if (inserted) document_frequency.push_back(0);
      if (term_counts[i][it->second]++ == 0) {
        ++document_frequency[static_cast<size_t>(it->second)];
      }
    }
  }
  const double n = static_cast<double>(corpus.size());
  index.idf_.reserve(document_frequency.size());
  for (int64_t df : document_frequency) {
    index.idf_.push_back(std::log(n / (1.0 + static_cast<double>(df))) + 1.0);
  }
  index.vectors_.reserve(corpus.size());
  for (const auto& counts : term_counts) {
    SparseVector vector;
    vector.reserve(counts.size());
    for (const auto& [term, count] : counts) {
      vector.emplace_back(term, count * index.idf_[static_cast<size_t>(term)]);
    }
    index.vectors_.push_back(std::move(vector));
  }
  index.documents_ = std::move(corpus);
  return index;
}

TfIdfIndex::SparseVector TfIdfIndex::Vectorize(std::string_view text) const {
  std::map<int32_t, double> counts;
  for (const std::string& term : RetrievalTerms(text)) {
    auto it = terms_.find(term);
    if (it != terms_.end()) counts[it->second] += 1.0;
  }
  SparseVector vector;
  vector.reserve(counts.size());
  for (const auto& [term, count] : counts) {
    vector.emplace_back(term, count * idf_[static_cast<size_t>(term)]);
  }
  return vector;
}

double TfIdfIndex::Idf(std::string_view term) const {
  auto it = terms_.find(std::string(term));
  return it == terms_.end() ? 0.0 : idf_[static_cast<size_t>(it->second)];
}

double TfIdfIndex::Cosine(const SparseVector& a, const SparseVector& b) {
  double dot = 0.0;
  size_t i = 0;
  size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      dot += a[i++].second * b[j++].second;
    }
  }
  if (dot == 0.0) return 0.0;
  auto norm = [](const SparseVector& v) {
    double sum = 0.0;
    for (const auto& [term, weight] : v) sum += weight * weight;
    return std::sqrt(sum);
  };
  return dot / (norm(a) * norm(b));
}

absl::StatusOr<RetrievalResult> TfIdfIndex::Retrieve(std::string_view question,
                                                     size_t count) const {
  if (count > documents_.size()) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "Insufficient corpus: %d documents requested, corpus has %d", count,
        documents_.size()));
  }
  const SparseVector query = Vectorize(question);
  std::vector<std::pair<double, size_t>> scored;
  scored.reserve(documents_.size());
  for (size_t i = 0; i < documents_.size(); ++i) {
    scored.emplace_back(Cosine(query, vectors_[i]), i);
  }
  auto better = [this](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return documents_[a.second].doc_id < documents_[b.second].doc_id;
  };
  std::partial_sort(scored.begin(),
                    scored.begin() + static_cast<ptrdiff_t>(count),
                    scored.end(), better);
  RetrievalResult result;
  result.ranked.reserve(count);
  result.scores.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    result.ranked.push_back(documents_[scored[i].second].doc_id);
    result.scores.push_back(scored[i].first);
  }
  return result;
}

const Document* TfIdfIndex::Find(std::string_view doc_id) const {
  auto it = by_id_.find(std::string(doc_id));
  return it == by_id_.end() ? nullptr : &documents_[it->second];
}

absl::StatusOr<VoterPartition> Partition(const RetrievalResult& result, int m,
                                         int k, Rng& rng) {
  if (m < 1 || k < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("Need m >= 1 and k >= 1, got m=%d k=%d", m, k));
  }
  const size_t total = static_cast<size_t>(m) * static_cast<size_t>(k);
  if (result.ranked.size() != total) {
    return absl::InvalidArgumentError(
        absl::StrFormat("Partition expects m*k = %d documents, got %d", total,
                        result.ranked.size()));
  }
  std::vector<std::string> shuffled = result.ranked;
  for (size_t i = shuffled.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.UniformBelow(i));
    std::swap(shuffled[i - 1], shuffled[j]);
  }
  VoterPartition partition;
  partition.subsets.reserve(static_cast<size_t>(m));
  for (size_t v = 0; v < static_cast<size_t>(m); ++v) {
    const auto begin = shuffled.begin() + static_cast<ptrdiff_t>(v * k);
    partition.subsets.emplace_back(begin, begin + k);
  }
  return partition;
}

}  // namespace dprag
