#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace volterra::cli {

/// Runs the command-line front end. Data (CSV) goes to `out` or the --csv
/// path, diagnostics and summaries go to `err`. Returns the process exit
/// code: 0 success, 1 usage error, 2 config/parse error, 3 numerical
/// failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// argv wrapper around the stream-based entry point.
int run(int argc, const char* const* argv);

} // namespace volterra::cli
