#pragma once

#include <string>
#include <vector>

namespace ctrecov {

// Command-line entry point; returns the process exit code
// (0 success, 1 domain error, 2 usage error).
int run_cli(const std::vector<std::string>& args);

}  // namespace ctrecov
