#include "cavity_bell/harness.hpp"

int main(int argc, char** argv) { return cavity_bell::cli_main(argc, argv); }
