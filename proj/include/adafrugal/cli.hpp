#pragma once

#include <string>
#include <vector>

namespace adafrugal {

/// Full command-line surface (subcommands run, compare, memplan,
/// schedule-dump). `args` excludes the program name. Returns the process
/// exit code: 0 ok, 1 configuration or usage error, 2 non-finite divergence.
/// Exposed as a library function so tests can drive the CLI in-process.
int cli_main(const std::vector<std::string>& args);

}  // namespace adafrugal
