#include <iostream>

#include "nodal_cli/app.hpp"

int main(int argc, char** argv) { return nodal::cli::run_cli(argc, argv, std::cout, std::cerr); }
