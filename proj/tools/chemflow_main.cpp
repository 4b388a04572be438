#include "chemflow/cli.hpp"

int main(int argc, char** argv) { return chemflow::cli_main(argc, argv); }
