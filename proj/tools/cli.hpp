#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ipdb::cli {

// Process exit codes.
enum Exit : int {
  kOk = 0,
  kIo = 1,
  kInvalid = 2,
  kQueryParse = 3,
  kBudget = 4,
  kModeMismatch = 5,
  kUsage = 64,
};

// Runs one `ipdb` invocation. args excludes the program name. Results go to
// out; diagnostics (as a JSON object) go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ipdb::cli
