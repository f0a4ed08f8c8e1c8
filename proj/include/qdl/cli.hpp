#pragma once

#include <iosfwd>
#include <string>
#include <vector>

// Command-line front end. Exit codes are a stable contract:
//   0 success, 2 usage/config error, 3 numerical failure, 4 validation failure.

namespace qdl::cli {

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace qdl::cli
