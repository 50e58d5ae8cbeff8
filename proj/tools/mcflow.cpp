#include "mcflow/cli.hpp"

int main(int argc, char** argv) { return mcf::cli::main(argc, argv); }
