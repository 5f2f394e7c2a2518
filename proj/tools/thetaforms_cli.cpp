#include <iostream>

#include "thetaforms/cli.hpp"

int main(int argc, char** argv) { return thetaforms::cli::run(argc, argv, std::cout, std::cerr); }
