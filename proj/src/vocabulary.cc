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

#include "dprag/vocabulary.h"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dprag {
namespace {

bool IsStrippable(char c) {
  switch (c) {
    case '.':
    case ',':
    case '!':
    case '?':
    case ';':
    case ':':
    case '"':
    case '\'':
    case '(':
    case ')':
      return true;
    default:
      return false;
  }
}

}  // namespace

Vocabulary::Vocabulary() {
  surfaces_.emplace_back(kEosSurface);
  ids_.emplace(std::string(kEosSurface), kEosId);
}

TokenId Vocabulary::Intern(std::string_view surface) {
  std::lock_guard<std::mutex> lock(mutex_);
  std::string key(surface);
  auto it = ids_.find(key);
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<TokenId>(surfaces_.size());
  surfaces_.push_back(key);
  ids_.emplace(std::move(key), id);
  return id;
}

std::optional<TokenId> Vocabulary::Find(std::string_view surface) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = ids_.find(std::string(surface));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::Surface(TokenId id) const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (id < 0 || static_cast<size_t>(id) >= surfaces_.size()) return {};
  return surfaces_[static_cast<size_t>(id)];
}

size_t Vocabulary::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return surfaces_.size();
}

std::vector<std::string> Vocabulary::SurfacesFrom(TokenId first_id) const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<std::string> out;
  for (size_t i = static_cast<size_t>(std::max<TokenId>(first_id, 0));
       i < surfaces_.size(); ++i) {
    out.push_back(surfaces_[i]);
  }
  return out;
}

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> words;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() &&
           std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
    }
    size_t j = i;
    while (j < text.size() &&
           !std::isspace(static_cast<unsigned char>(text[j]))) {
      ++j;
    }
    if (j > i) {
      std::string_view piece = text.substr(i, j - i);
      size_t begin = 0;
      size_t end = piece.size();
      while (begin < end && IsStrippable(piece[begin])) ++begin;
      while (end > begin && IsStrippable(piece[end - 1])) --end;
      std::string word(begin < end ? piece.substr(begin, end - begin) : piece);
      for (char& c : word) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
      words.push_back(std::move(word));
    }
    i = j;
  }
  return words;
}

}  // namespace dprag
