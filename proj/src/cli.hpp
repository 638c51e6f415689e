#pragma once

#include <ostream>

namespace xfrisk::cli {

/// Exit codes: 0 success, 1 usage or configuration, 2 data validation,
/// 3 internal error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

/// Runs the `xfrisk` command line. Normal output goes to `out`,
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace xfrisk::cli
