#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cqa::cli {

/// Exit codes of the `cqa` tool.
enum Exit : int { kTrue = 0, kFalse = 1, kUsage = 2, kInapplicable = 3 };

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cqa::cli
