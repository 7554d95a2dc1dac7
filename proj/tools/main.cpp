#include "ndetect/cli.hpp"

int main(int argc, char** argv) { return ndetect::cli::main(argc, argv); }
