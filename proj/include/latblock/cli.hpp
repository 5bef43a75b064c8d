#pragma once

namespace latblock {

/// Entry point of the `latblock` tool. Returns 0 on success, 2 on invalid input, 1 otherwise.
int run_cli(int argc, char** argv);

}  // namespace latblock
