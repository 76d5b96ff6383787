#pragma once

namespace afreg::cli {

/// Entry point of the `afreg` command; returns the process exit code
/// (0 success, 1 runtime error, 2 usage error).
int run(int argc, char** argv);

}  // namespace afreg::cli
