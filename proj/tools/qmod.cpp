#include "qmod/cli.hpp"

int main(int argc, char** argv) { return qmod::cli::run(argc, argv); }
