#include "precodelab/harness.hpp"

int main(int argc, char** argv) { return precodelab::run_cli(argc, argv); }
