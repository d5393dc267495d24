#include <iostream>

#include "bnic/cli.hpp"

int main(int argc, char** argv) { return bnic::runCli(argc, argv, std::cout, std::cerr); }
