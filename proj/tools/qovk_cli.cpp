#include "qovk/cli.hpp"

int main(int argc, char** argv) { return qovk::cli::main_entry(argc, argv); }
