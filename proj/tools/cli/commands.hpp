#pragma once

// The asplat command line: render, fit, analyze, gradcheck.
//
// Exit codes: 0 success, 1 gradcheck failure, 2 bad input, 3 I/O error,
// 4 unsupported operation.

#include <ostream>
#include <string>
#include <vector>

namespace asplat::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kBadInput = 2,
  kIoError = 3,
  kUnsupported = 4,
};

/// args excludes the program name, e.g. {"render", "--scene", "s.json", ...}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace asplat::cli
