#include "hardwall/cli.hpp"

int main(int argc, char** argv) { return hardwall::cli_run(argc, argv); }
