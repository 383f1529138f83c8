#include "pvchart/cli.hpp"

int main(int argc, char** argv) { return pvchart::run_cli(argc, argv); }
