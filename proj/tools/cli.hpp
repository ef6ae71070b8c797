#pragma once

#include <ostream>

namespace modliar::cli {

enum ExitCode : int {
  kOk = 0,
  kNegative = 1,       // the question was answered "no" (invalid proof, non-valid formula, ...)
  kInputError = 2,
  kIndeterminate = 3,  // tableau resource cap exceeded
};

/// Runs the `modliar` command line. argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace modliar::cli
