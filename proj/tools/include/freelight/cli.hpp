#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace freelight::cli {

// Runs one invocation; args excludes the program name. Progress goes to err,
// the final JSON summary to out. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace freelight::cli
