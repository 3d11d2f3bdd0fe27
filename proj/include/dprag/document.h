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

#ifndef DPRAG_DOCUMENT_H_
#define DPRAG_DOCUMENT_H_

#include <string>

namespace dprag {

// One retrievable record. Each document belongs to exactly one individual.
struct Document {
  std::string doc_id;
  std::string text;
  std::string owner_id;

  friend bool operator==(const Document&, const Document&) = default;
};

}  // namespace dprag

#endif  // DPRAG_DOCUMENT_H_
