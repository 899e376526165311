#pragma once

#include <iostream>

namespace mixreg {

/// Entry point of the mixreg command line tool. Returns the process exit
/// code: 0 on success, 1 on argument errors (usage is printed), 2 on
/// runtime or numerical failures.
int cli_main(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace mixreg
