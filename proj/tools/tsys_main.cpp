#include "tsys/cli.hpp"

int main(int argc, char** argv) { return tsys::cli::run(argc, argv); }
