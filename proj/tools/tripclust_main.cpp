// Apache License, Version 2.0, refer to LICENSE.txt

#include "tripclust/cli.hpp"

int main(int argc, char** argv) { return tripclust::cli::run_cli(argc, argv); }
