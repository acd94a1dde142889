#include "genprobe/cli.hpp"

int main(int argc, char** argv) { return genprobe::cli::run(argc, argv); }
