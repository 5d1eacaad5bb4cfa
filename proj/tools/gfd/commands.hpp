#pragma once

namespace gfd::cli {

/// Entry point of the `gfd` executable. Returns the process exit code:
/// 0 success, 1 runtime failure, 2 invalid input or configuration.
int run(int argc, char** argv);

}  // namespace gfd::cli
