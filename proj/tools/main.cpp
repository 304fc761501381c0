#include "matmoment/cli.hpp"

int main(int argc, char** argv) { return matmoment::cli::run(argc, argv); }
