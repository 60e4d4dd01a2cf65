#include "agarch/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return agarch::cli::main_entry(argc, argv, std::cout, std::cerr);
}
