#include "helimag/cli.hpp"

int main(int argc, char** argv) { return helimag::cli_main(argc, argv); }
