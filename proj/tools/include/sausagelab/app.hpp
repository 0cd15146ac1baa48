#pragma once

#include <string>
#include <vector>

namespace sausagelab {

/// Exit codes of the command line tool.
enum ExitCode : int {
  kOk = 0,
  kAssertionFailed = 1,
  kConfigError = 2,
  kResourceLimit = 3,
};

/// Runs one invocation, `args` excluding the program name:
/// `<subcommand> --config <path> --out <dir> [--workers N] [--seed S]`.
/// SAUSAGE_SEED and SAUSAGE_WORKERS override the config when the flags are
/// absent.
int run_command(const std::vector<std::string>& args);

}  // namespace sausagelab
