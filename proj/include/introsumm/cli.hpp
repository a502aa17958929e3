#pragma once

#include <string>
#include <vector>

namespace introsumm {

/// Entry point behind the `introsumm` binary. `args` excludes the program
/// name. Returns 0 on success, 2 on usage errors, 1 on runtime failures.
int run(std::vector<std::string> args);

}  // namespace introsumm
