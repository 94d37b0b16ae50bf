#include "xyzsep/cli.hpp"

int main(int argc, char** argv) { return xyzsep::cli::run(argc, argv); }
