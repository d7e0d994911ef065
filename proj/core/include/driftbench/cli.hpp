// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace driftbench {

/// Entry point of the driftbench command-line tool.  Subcommands:
/// simulate | estimate | posterior | study.  Returns 0 on success, 1 on a
/// usage error, 2 on a numerical failure.
int cli_main(const std::vector<std::string>& args);

}  // namespace driftbench
