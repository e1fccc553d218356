#include "cli.hpp"

int main(int argc, char** argv) { return loopgrad::cli::main(argc, argv); }
