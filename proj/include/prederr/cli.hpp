#pragma once

#include <iosfwd>

namespace prederr::cli {

enum ExitCode : int {
  success = 0,
  usage = 1,
  no_error_found = 2,
  not_realizable = 3,
  environment = 4,
  incomplete = 5,
};

// Entry point behind the command-line tool; JSON goes to `out`, human
// summaries to `err`.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace prederr::cli
