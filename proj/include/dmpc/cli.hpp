#pragma once

namespace dmpc {

/// Entry point of the dmpc_sim tool. Exit codes: 0 success, 1 invalid input
/// or usage, 2 solver failure.
int cli_main(int argc, char **argv);

}  // namespace dmpc
