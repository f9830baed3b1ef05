#pragma once

#include <iosfwd>

namespace pisotnorm::cli {

/// Runs the command line tool and returns its exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pisotnorm::cli
