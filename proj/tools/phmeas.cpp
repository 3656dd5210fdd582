#include <iostream>

#include "phmeas/cli.hpp"

int main(int argc, char** argv)
{
    return phmeas::cli::run_cli(argc, argv, std::cout, std::cerr);
}
