#include "condlab/cli.hpp"

int main(int argc, char** argv) { return condlab::run_cli(argc, argv); }
