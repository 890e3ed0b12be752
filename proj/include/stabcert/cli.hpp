#pragma once

// Subcommands: certify, lyapunov, bound, simulate. Human-readable tables go to
// `out`; JSON and CSV artifacts are written under --out-dir.

#include <iosfwd>
#include <string>
#include <vector>

namespace stabcert::cli {

enum ExitCode : int {
  kOk = 0,
  kInfeasible = 2,  ///< no certificate, or the requested one fails verification
  kUsage = 64,
  kDataError = 66,
  kInternal = 70,  ///< unexpected failure, e.g. an output file cannot be written
};

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stabcert::cli
