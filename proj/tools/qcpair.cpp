#include "qcpair/cli.hpp"

int main(int argc, char** argv) { return qcpair::run_cli(argc, argv); }
