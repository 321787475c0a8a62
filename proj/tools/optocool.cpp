#include "optocool/cli.hpp"

int main(int argc, char** argv) { return optocool::cli::run(argc, argv); }
