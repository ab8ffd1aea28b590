#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace loglap {

// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kViolation = 1, kPreconditionUnmet = 2, kConfigError = 3 };

// Dispatches one subcommand; args excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace loglap
