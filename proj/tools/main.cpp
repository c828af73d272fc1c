#include "cli.hpp"

int main(int argc, char** argv) { return nliht::cli::run(argc, argv); }
