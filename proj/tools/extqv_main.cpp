#include "extqv/cli.hpp"

int main(int argc, char** argv) { return extqv::cli::main_entry(argc, argv); }
