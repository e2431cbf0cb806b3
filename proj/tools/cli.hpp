#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace camkit::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kValidationError = 1;
inline constexpr int kIoError = 2;

int run(int argc, char** argv);

// args[0] is the program name. Console output goes to `out`, diagnostics
// and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace camkit::cli
