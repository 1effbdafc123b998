#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bugtriage::cli {

/// Runs one command line (arguments without the program name). Returns the
/// exit code: 0 on success, 1 on runtime failure, 2 on usage, schema or
/// input errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bugtriage::cli
