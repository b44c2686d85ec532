#include <iostream>

#include "phasecert/cli.hpp"

int main(int argc, char** argv)
{
    return phasecert::main_entry(argc, argv, std::cout, std::cerr);
}
