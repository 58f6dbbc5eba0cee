#include "ends/cli.hpp"

int main(int argc, char** argv) { return ends::cli::run(argc, argv); }
