#pragma once

namespace qclock {

// Exit codes: 0 success, 1 numeric failure, 2 bad arguments.
int cli_main(int argc, char** argv);

}  // namespace qclock
