#pragma once

#include <iosfwd>

namespace odlae {

// Entry point of the odlae executable. Exit codes: 0 success, 1 runtime
// failure, 2 usage or configuration error, 3 data or checkpoint error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace odlae
