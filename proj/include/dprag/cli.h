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

// The dprag command-line tool: accountant, generate, eval-qa and eval-mia.

#ifndef DPRAG_CLI_H_
#define DPRAG_CLI_H_

#include <ostream>

#include "absl/status/status.h"

namespace dprag {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitInfeasible = 3,
  kExitData = 4,
  kExitBackend = 5,
};

// Maps a failed status to its exit code: OutOfRange is an infeasible budget,
// Unavailable and DeadlineExceeded are backend failures and everything else
// is a data error.
int ExitCodeFor(const absl::Status& status);

// Runs one invocation. Results go to `out`, diagnostics to `err`.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace dprag

#endif  // DPRAG_CLI_H_
