#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ranstack::cli {

// Exit codes, stable and documented:
//   0  success
//   1  unreadable or unparseable configuration
//   2  configuration failed validation
//   3  run aborted on a mid-run invariant violation
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ranstack::cli
