#include "omprip/cli.hpp"

int main(int argc, char** argv) { return omprip::cli::cli_main(argc, argv); }
