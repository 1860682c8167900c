#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace losslim {

inline constexpr const char* kToolVersion = "0.1.0";

// Entry point shared by the binary and the tests. Returns the process exit
// code: 0 success, 1 I/O or parse, 2 model-class violation, 3 numerical.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace losslim
