#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace chiralwg::cli {

// Full dispatch: `args` excludes the program name.  CSV goes to `out` unless
// --out names a file; diagnostics go to `err`.  Returns the process exit
// code: 0 ok, 1 physics check failed, 2 input error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace chiralwg::cli
