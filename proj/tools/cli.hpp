#pragma once

#include <iosfwd>

namespace tsplab::cli {

/// Runs the command line. Exit codes: 0 success, 1 runtime error, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tsplab::cli
