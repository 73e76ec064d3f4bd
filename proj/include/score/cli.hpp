// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace score::cli {

/// Run one pipeline subcommand. `args` excludes the program name.
/// Exit codes: 0 success, 1 runtime or validation failure, 2 usage error.
int run_command(const std::vector<std::string>& args);

}  // namespace score::cli
