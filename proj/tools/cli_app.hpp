#pragma once

#include <string>
#include <vector>

namespace cseer::cli {

// Entry point for the command-line tool; args exclude the program name.
// Returns 0 on success, 1 on a runtime failure, 2 on a usage error.
int run(std::vector<std::string> args);

}  // namespace cseer::cli
