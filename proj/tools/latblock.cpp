#include "latblock/cli.hpp"

int main(int argc, char** argv) { return latblock::run_cli(argc, argv); }
