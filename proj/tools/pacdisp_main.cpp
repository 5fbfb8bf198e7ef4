#include <iostream>

#include "pacdisp/cli.hpp"

int main(int argc, char** argv)
{
    return pacdisp::run_cli(argc, argv, std::cout, std::cerr);
}
