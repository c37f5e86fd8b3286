#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace monopart::cli {

/// Exit codes: 0 success, 1 unexpected failure, 2 usage or validation error,
/// 3 refuted certificate under --strict.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace monopart::cli
