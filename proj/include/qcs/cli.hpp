#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qcs {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_numerical = 2, exit_io = 3 };

/// Entry point shared by the `qcs` executable and the tests. `args` excludes
/// the program name. Standard output receives only help text and the `rip`
/// result line; diagnostics and the resolved configuration go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Subcommand names in registration order.
std::vector<std::string> cli_subcommands();

} // namespace qcs
