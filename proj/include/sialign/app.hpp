#pragma once

#include <string>
#include <vector>

namespace sialign {

// Runs the si_align command line; args excludes the program name.
// Returns 0 on success, 1 on validation errors and usage errors, 2 on I/O or
// parse errors.
int run_cli(const std::vector<std::string>& args);

}  // namespace sialign
