#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace subopt::cli {

// Runs one command (args exclude the program name) and returns the process
// exit code: 0 success, 2 infeasibility, 1 usage or validation error.
// All prose goes to out/err; reports and CSVs are written under --out.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace subopt::cli
