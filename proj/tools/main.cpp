#include "dmpc/cli.hpp"

int main(int argc, char **argv) { return dmpc::cli_main(argc, argv); }
