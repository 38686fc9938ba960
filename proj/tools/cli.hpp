#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace linkmap::cli {

/// Runs one command line (without the program name). Returns the process
/// exit code: 0 success, 1 usage error, 2 data error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace linkmap::cli
