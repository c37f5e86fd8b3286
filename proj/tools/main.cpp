#include "cli.hpp"

int main(int argc, char** argv) { return monopart::cli::run(argc, argv); }
