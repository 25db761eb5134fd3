#pragma once

#include <string>
#include <vector>

namespace condlab {

// Full command-line entry point: parses flags and the JSON config, runs the
// selected subcommand, writes its output files plus a run manifest.
// Returns the process exit code: 0 on success, 2 on configuration errors,
// 3 on numerical aborts.
int run_cli(int argc, char** argv);

// Same, for tests: args exclude the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace condlab
