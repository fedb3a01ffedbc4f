#include "mpbell/cli.hpp"

int main(int argc, char** argv) { return mpbell::cli_main(argc, argv); }
