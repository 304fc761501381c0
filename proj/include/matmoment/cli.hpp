#pragma once

#include <iosfwd>

namespace matmoment::cli {

// Exit codes: 0 ok, 1 usage or invalid input, 2 certification failure, 3 numerical failure, 4 I/O.
int run(int argc, char** argv);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace matmoment::cli
