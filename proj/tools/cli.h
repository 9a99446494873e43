// Copyright 2026 The ldpmd Authors
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


#ifndef LDPMD_TOOLS_CLI_H_
#define LDPMD_TOOLS_CLI_H_

#include <ostream>

#include "absl/status/status.h"

namespace ldpmd::cli {

// Process exit code for a status: 0 ok, 2 ConfigError or other invalid
// input, 3 IoError or missing file, 1 anything else.
int ExitCode(const absl::Status& status);

// Entry point of the `ldpmd` tool, usable in-process by tests.
int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace ldpmd::cli

#endif  // LDPMD_TOOLS_CLI_H_
