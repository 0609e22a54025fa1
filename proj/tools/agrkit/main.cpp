#include "agrkit/cli.hpp"

#include <iostream>

int main( int argc, char** argv ) { return agrkit::run_cli( argc, argv, std::cout, std::cerr ); }
