#include "litmeta/cli.hpp"

int main(int argc, char** argv) { return litmeta::cli_main(argc, argv); }
