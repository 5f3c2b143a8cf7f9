#include "phi4/lab/cli.hpp"

int main(int argc, char** argv) { return phi4::lab::run_cli(argc, argv); }
