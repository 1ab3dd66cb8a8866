#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ofo::cli {

/// Exit codes: 0 success, 1 not certified or a run failed, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ofo::cli
