#include <iostream>

#include "ccheis/cli.hpp"

int main(int argc, char** argv)
{
    return ccheis::run_cli(argc, argv, std::cout, std::cerr);
}
