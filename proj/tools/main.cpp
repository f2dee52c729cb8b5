#include "tvreg/cli.hpp"

int main(int argc, char** argv) { return tvreg::cli::main(argc, argv); }
