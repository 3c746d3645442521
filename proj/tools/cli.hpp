#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sacks {

// Dispatches one invocation. Returns the process exit status: 0 for pass
// verdicts, 1 for fail verdicts, 2 for usage errors, 3 for budget overflow.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace sacks
