#include "ensim/cli/cli.hpp"

int main(int argc, char** argv) { return ensim::cli::run(argc, argv); }
