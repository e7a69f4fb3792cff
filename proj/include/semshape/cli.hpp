#pragma once

namespace semshape {

// Entry point behind the `semshape` binary; exposed so the command surface
// can be driven from tests.  Returns the process exit code: 0 success,
// 1 precondition or usage failure, 2 numerical non-convergence.
int run_cli(int argc, const char* const* argv);

}
