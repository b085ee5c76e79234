#pragma once

#include <iosfwd>

namespace gridfed::cli {

/// Entry point of the `gridfed` command. Returns the process exit code:
/// 0 on success, 1 for configuration or federation errors, 2 for usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace gridfed::cli
