#pragma once

#include "ace/error.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ace::cli {

enum ExitCode : int {
    exit_success = 0,
    exit_usage = 2,
    exit_data = 3,
    exit_numerical = 4,
};

int exit_code_for(ErrorKind kind) noexcept;

/// Entry point shared by the `ace` binary and the tests. Errors go to err,
/// check-operator's deviation goes to out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace ace::cli
