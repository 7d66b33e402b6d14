#include "pc2/cli.hpp"

int main(int argc, char** argv) { return pc2::cli::run(argc, argv); }
