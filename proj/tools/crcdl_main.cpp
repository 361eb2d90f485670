#include "crcdl/cli.hpp"

int main(int argc, char** argv) { return crcdl::run_cli(argc, argv); }
