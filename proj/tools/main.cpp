#include "cli.hpp"

int main(int argc, char** argv) { return fuzznum::cli::run(argc, argv); }
