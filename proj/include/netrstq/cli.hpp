#pragma once

#include <string>
#include <vector>

namespace netrstq {

// Batch CLI entry point. Exit code 0 on success, 1 on validation error,
// 2 on numerical failure.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

}  // namespace netrstq
