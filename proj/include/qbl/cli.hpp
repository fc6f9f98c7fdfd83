#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qbl {

/// Runs the command line `args` (without the program name). Returns 0 on
/// success, 1 when an inequality margin is violated and 2 on input errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qbl
