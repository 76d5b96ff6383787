#include "afreg/cli.hpp"

int main(int argc, char** argv) { return afreg::cli::run(argc, argv); }
