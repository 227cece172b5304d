#include "noisestab/cli.hpp"

int main(int argc, char** argv) { return noisestab::run(argc, argv); }
