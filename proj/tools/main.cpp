#include "mixreg/cli.hpp"

int main(int argc, char** argv) { return mixreg::cli_main(argc, argv); }
