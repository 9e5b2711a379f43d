#ifndef COPDEP_CLI_HPP
#define COPDEP_CLI_HPP

#include "copdep/common.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace copdep {

/// Process exit codes.
enum ExitCode : int {
  exit_ok = 0,
  exit_invalid_input = 2,
  exit_numerical = 3,
  exit_property_failure = 4,
};

int exit_code_for(ErrorCode code);

/// Entry point for the copdep tool. `args` excludes the program name.
/// Machine-readable output goes to `out`, the human summary to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace copdep

#endif  // COPDEP_CLI_HPP
