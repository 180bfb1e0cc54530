// Command-line front end. Exit codes: 0 success, 1 check failure or
// instability, 2 input error.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fbent::cli {

inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kInputError = 2;

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fbent::cli
