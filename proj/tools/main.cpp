#include "semshape/cli.hpp"

int main(int argc, char** argv) { return semshape::run_cli(argc, argv); }
