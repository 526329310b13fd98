#include "qclock/cli.hpp"

int main(int argc, char** argv) { return qclock::cli_main(argc, argv); }
