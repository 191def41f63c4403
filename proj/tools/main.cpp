#include "cli.hpp"

int main(int argc, char** argv) { return psaf::cli::main_entry(argc, argv); }
