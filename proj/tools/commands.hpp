#pragma once

namespace strokefit::cli {

enum ExitCode : int { kSuccess = 0, kValidationError = 1, kNumericalFailure = 2 };

/// strokefit sketch | render | init | verify
int run(int argc, char** argv);

}  // namespace strokefit::cli
