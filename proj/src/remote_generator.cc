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

#include "dprag/remote_generator.h"

#include <chrono>
#include <cstdlib>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "dprag/status_macros.h"
#include "dprag/string_compat.h"
#include "httplib.h"
#include "json.hpp"

namespace dprag {
namespace {

constexpr size_t kBodyExcerpt = 200;

bool IsValidUtf8(std::string_view text) {
  size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    size_t extra = 0;
    if (c < 0x80) {
      extra = 0;
    } else if ((c >> 5) == 0x6) {
      extra = 1;
    } else if ((c >> 4) == 0xe) {
      extra = 2;
    } else if ((c >> 3) == 0x1e) {
      extra = 3;
    } else {
      return false;
    }
    if (i + extra >= text.size() && extra > 0) return false;
    for (size_t j = 1; j <= extra; ++j) {
      if ((static_cast<unsigned char>(text[i + j]) >> 6) != 0x2) return false;
    }
    i += extra + 1;
  }
  return true;
}

const nlohmann::json* FollowPath(const nlohmann::json& root,
                                 std::string_view path) {
  const nlohmann::json* node = &root;
  for (absl::string_view part : absl::StrSplit(ToAbsl(path), '.')) {
    size_t index = 0;
    if (node->is_array() && absl::SimpleAtoi(part, &index)) {
      if (index >= node->size()) return nullptr;
      node = &(*node)[index];
    } else if (node->is_object() && node->contains(std::string(part))) {
      node = &(*node)[std::string(part)];
    } else {
      return nullptr;
    }
  }
  return node;
}

}  // namespace

RemoteGenerator::RemoteGenerator(const RemoteGeneratorOptions& options,
                                 std::string base, std::string path)
    : options_(options),
      prompt_(options.prompt_template),
      base_url_(std::move(base)),
      path_(std::move(path)),
      in_flight_(
          std::make_unique<std::counting_semaphore<>>(options.max_in_flight)) {}

absl::StatusOr<std::unique_ptr<RemoteGenerator>> RemoteGenerator::Create(
    const RemoteGeneratorOptions& options) {
  constexpr std::string_view kScheme = "http://";
  if (options.endpoint.rfind(kScheme, 0) != 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "Remote endpoint must start with http://, got '%s'", options.endpoint));
  }
  const size_t slash = options.endpoint.find('/', kScheme.size());
  std::string base = options.endpoint.substr(0, slash);
  std::string path =
      slash == std::string::npos ? "/" : options.endpoint.substr(slash);
  if (base.size() == kScheme.size()) {
    return absl::InvalidArgumentError("Remote endpoint has no host");
  }
  if (!(options.timeout_seconds > 0.0)) {
    return absl::InvalidArgumentError("Remote timeout must be positive");
  }
  if (options.retries < 0 || options.max_in_flight < 1) {
    return absl::InvalidArgumentError(
        "Remote retries must be >= 0 and max_in_flight >= 1");
  }
  return std::unique_ptr<RemoteGenerator>(
      new RemoteGenerator(options, std::move(base), std::move(path)));
}

absl::StatusOr<Token> RemoteGenerator::MapCompletion(
    std::string_view text) const {
  if (!IsValidUtf8(text)) {
    return absl::UnavailableError(
        "Backend returned a completion that is not valid UTF-8");
  }
  const std::vector<std::string> words = SplitWords(text);
  if (words.empty()) return vocabulary_.MakeToken(kEosId);
  return vocabulary_.MakeToken(vocabulary_.Intern(words.front()));
}

absl::StatusOr<std::string> RemoteGenerator::Complete(
    const std::string& prompt) const {
  nlohmann::json request = {{"model", options_.model},
                            {"prompt", prompt},
                            {"max_tokens", 1},
                            {"temperature", 0}};
  const std::string body = request.dump();
  httplib::Headers headers;
  if (!options_.token_env.empty()) {
    if (const char* token = std::getenv(options_.token_env.c_str());
        token != nullptr && *token != '\0') {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(options_.timeout_seconds));

  in_flight_->acquire();
  absl::Status last_error;
  std::string response_body;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    httplib::Client client(base_url_);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto result = client.Post(path_, headers, body, "application/json");
    if (!result) {
      last_error = absl::UnavailableError(
          absl::StrFormat("Backend %s%s unreachable: %s", base_url_, path_,
                          httplib::to_string(result.error())));
      continue;
    }
    if (result->status < 200 || result->status >= 300) {
      last_error = absl::UnavailableError(
          absl::StrFormat("Backend returned HTTP %d: %s", result->status,
                          result->body.substr(0, kBodyExcerpt)));
      continue;
    }
    last_error = absl::OkStatus();
    response_body = std::move(result->body);
    break;
  }
  in_flight_->release();
  RETURN_IF_ERROR(last_error);

  const nlohmann::json response =
      nlohmann::json::parse(response_body, nullptr, false);
  if (response.is_discarded()) {
    return absl::UnavailableError(
        absl::StrFormat("Backend returned malformed JSON: %s",
                        response_body.substr(0, kBodyExcerpt)));
  }
  const std::vector<std::string> paths =
      options_.response_field.empty()
          ? std::vector<std::string>{"choices.0.text", "content"}
          : std::vector<std::string>{options_.response_field};
  for (const std::string& path : paths) {
    const nlohmann::json* node = FollowPath(response, path);
    if (node != nullptr && node->is_string()) return node->get<std::string>();
  }
  return absl::UnavailableError(
      absl::StrFormat("Backend response has no completion text: %s",
                      response_body.substr(0, kBodyExcerpt)));
}

absl::StatusOr<Token> RemoteGenerator::NextToken(
    const GenerationContext& context) const {
  ASSIGN_OR_RETURN(const size_t dropped,
                   DocumentsToDrop(prompt_, context, options_.context_window));
  GenerationContext trimmed = context;
  trimmed.documents = context.documents.subspan(dropped);
  ASSIGN_OR_RETURN(const std::string text, Complete(prompt_.Render(trimmed)));
  return MapCompletion(text);
}

}  // namespace dprag
