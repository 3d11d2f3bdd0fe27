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

#ifndef DPRAG_REMOTE_GENERATOR_H_
#define DPRAG_REMOTE_GENERATOR_H_

#include <cstddef>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "dprag/generator.h"
#include "dprag/vocabulary.h"

namespace dprag {

struct RemoteGeneratorOptions {
  // Completion endpoint, e.g. "http://127.0.0.1:8080/v1/completions".
  // Plain HTTP only.
  std::string endpoint;
  std::string model;
  // Name of the environment variable holding the bearer token; empty or unset
  // variable means no Authorization header.
  std::string token_env = "DPRAG_API_TOKEN";
  double timeout_seconds = 30.0;
  // Extra attempts after a transport failure or non-2xx status.
  int retries = 2;
  int max_in_flight = 4;
  // Dotted path to the completion text in the response ("choices.0.text").
  // Empty tries "choices.0.text" and then "content".
  std::string response_field;
  // Prompt window in words, 0 for unlimited.
  size_t context_window = 0;
  std::string prompt_template{PromptTemplate::kDefault};
};

// Generator backed by a completion-style HTTP endpoint. Each call POSTs
// {"model", "prompt", "max_tokens": 1, "temperature": 0} and maps the first
// word of the returned text into the vocabulary (empty text is <eos>). New
// surfaces extend the vocabulary.
class RemoteGenerator : public Generator {
 public:
  // InvalidArgument for a malformed endpoint or options.
  static absl::StatusOr<std::unique_ptr<RemoteGenerator>> Create(
      const RemoteGeneratorOptions& options);

  // Unavailable on transport failure, non-2xx status (after retries),
  // malformed responses and unmappable text; the message carries the HTTP
  // status and an excerpt of the body.
  absl::StatusOr<Token> NextToken(
      const GenerationContext& context) const override;

  const Vocabulary& vocabulary() const override { return vocabulary_; }

  // Completion text -> token, extending the vocabulary.
  absl::StatusOr<Token> MapCompletion(std::string_view text) const;

 private:
  RemoteGenerator(const RemoteGeneratorOptions& options, std::string base,
                  std::string path);

  absl::StatusOr<std::string> Complete(const std::string& prompt) const;

  RemoteGeneratorOptions options_;
  PromptTemplate prompt_;
  std::string base_url_;
  std::string path_;
  mutable Vocabulary vocabulary_;
  mutable std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

}  // namespace dprag

#endif  // DPRAG_REMOTE_GENERATOR_H_
