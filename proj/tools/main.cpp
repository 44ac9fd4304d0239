#include "matsing/cli.hpp"

int main(int argc, char** argv) { return matsing::cli::main_entry(argc, argv); }
