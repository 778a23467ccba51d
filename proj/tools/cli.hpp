#pragma once

#include <ostream>

namespace geocausal::cli {

/// Process exit status, one per failure class.
enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kValidation = 2,
  kIo = 3,
  kEstimation = 4,
  kTrajectoryEscape = 5,
  kPartialFailure = 6,
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "GEOCAUSAL_OUTPUT_DIR";

/// Parses argv and runs one subcommand. Result records go to `out`,
/// diagnostics to `err`; artifacts are written to the output directory.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace geocausal::cli
