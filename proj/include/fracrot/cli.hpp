#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fracrot/verify.hpp"

namespace fracrot::cli {

enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailed = 1,
  kUsageError = 2,
  kEngineError = 3,
};

/// Runs one invocation. `args` excludes the program name. Results go to
/// `out`; usage diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// CSV table of a verification report (header row included).
void write_verify_csv(const verify::Report& report, std::ostream& out);

inline int exit_code_for(const verify::Report& report) {
  return report.all_passed() ? kSuccess : kVerificationFailed;
}

/// "%.17g"
std::string format_number(double x);

}  // namespace fracrot::cli
