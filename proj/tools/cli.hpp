#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace empath_eval::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kData = 3,
  kBackend = 4,
};

/// Runs the command line in-process. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace empath_eval::cli
