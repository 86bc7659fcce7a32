#pragma once

#include "remest/model.hpp"
#include "remest/results.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace remest {

/// Exit codes of run_command.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,     // usage errors, I/O errors, failed self-test checks
  kExitValidation = 2,  // config or model validation
  kExitSolver = 3,      // solver non-convergence and search failures
};

/// Entry point of the `remest` tool. `args` excludes the program name.
/// Results go to --out (stdout when absent); errors are one JSON object
/// per line on `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct SelfTestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Structural conformance checks on `model` over `lambda_grid`.
std::vector<SelfTestCheck> run_selftest(const SystemModel& model, const std::vector<double>& lambda_grid);

}  // namespace remest
