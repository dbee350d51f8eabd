#include "twobit/cli.hpp"

int main(int argc, char** argv) { return twobit::run_cli(argc, argv); }
