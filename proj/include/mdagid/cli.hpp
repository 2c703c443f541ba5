#pragma once

#include <ostream>

namespace mdagid {

// Exit codes: 0 success, 1 a non-identified verdict under --strict or a
// failed verification, 2 bad input.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace mdagid
