#pragma once

namespace hicode {

// Entry point behind the `hicode` binary; exposed so tests can drive the
// exact command-line surface in-process. Returns the process exit code:
// 0 success, 1 usage error, 2 input/parse error.
int cli_main(int argc, const char* const* argv);

}  // namespace hicode
