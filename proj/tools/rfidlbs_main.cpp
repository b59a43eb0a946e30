#include "rfidlbs/cli.hpp"

int main(int argc, char** argv) { return rfidlbs::cli::main(argc, argv); }
