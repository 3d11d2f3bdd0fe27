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

// JSON serialization of generation traces and per-run file naming.

#ifndef DPRAG_TRACE_IO_H_
#define DPRAG_TRACE_IO_H_

#include <filesystem>
#include <string>

#include "absl/status/statusor.h"
#include "dprag/engine.h"
#include "dprag/vocabulary.h"
#include "json.hpp"

namespace dprag {

nlohmann::json RunConfigToJson(const RunConfig& config);

// Token ids are written alongside their surfaces from `vocabulary`.
nlohmann::json TraceToJson(const GenerationTrace& trace,
                           const Vocabulary& vocabulary);

// Hex FNV-1a of the canonical config JSON with the seed removed.
std::string ConfigHash(const RunConfig& config);

// "trace-<config hash>-<seed>.json"
std::string TraceFileName(const RunConfig& config);

// Writes the trace into `directory` (created if needed) and returns the path.
absl::StatusOr<std::filesystem::path> WriteTrace(
    const GenerationTrace& trace, const Vocabulary& vocabulary,
    const std::filesystem::path& directory);

}  // namespace dprag

#endif  // DPRAG_TRACE_IO_H_
