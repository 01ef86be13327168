#include "satscape/cli.hpp"

int main(int argc, char** argv) { return satscape::cli::main_entry(argc, argv); }
