#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace krein::cli {

enum ExitCode : int { exit_pass = 0, exit_identity_failure = 1, exit_usage = 2 };

// Runs one command line (without the program name). Human-readable progress
// goes to out, diagnostics to err; artifacts go to the --out directory.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace krein::cli
